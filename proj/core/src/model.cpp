#include <cmath>
#include <stdexcept>
#include <string>

#include "asep/model.hpp"
#include "asep/numeric.hpp"

namespace asep {

ModelParams ModelParams::make(double p, double rho) {
  if (!(p > 0.5 && p <= 1.0)) throw std::invalid_argument("p must lie in (1/2, 1]");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0, 1)");
  ModelParams m;
  m.p = p;
  m.q = 1.0 - p;
  m.gamma = p - m.q;
  m.rho = rho;
  return m;
}

double rate_I_gamma_near(double A, const ModelParams& m) {
  const double v = m.lln_velocity();
  if (!(A > 0.0)) throw std::domain_error("rate_I_gamma_near requires A > 0");
  return A * std::log(A / v) - A + v;
}

double rate_I_gamma_far(double A, const ModelParams& m) {
  return rate_IZ(A, m) - A * std::log(1.0 - m.rho) - m.gamma * m.rho;
}

double rate_I_gamma(double A, const ModelParams& m) {
  if (!(A > m.lln_velocity())) throw std::domain_error("rate_I_gamma requires A > gamma(1-rho)");
  return A >= m.gamma ? rate_I_gamma_far(A, m) : rate_I_gamma_near(A, m);
}

double rate_poisson(double a, double rho, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("rate_poisson requires t > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0, 1)");
  if (a < 0.0) return kInfiniteCost;
  const double mean = (1.0 - rho) * t;
  return xlogxy(a, mean) - a + mean;
}

double rate_IZ(double A, const ModelParams& m) {
  if (m.q == 0.0) {
    if (A < 0.0) return kInfiniteCost;
    return xlogxy(A, m.p) - A + m.p;
  }
  const TiltedRates t = tilt_constant(A, m);
  return A * std::log(t.c) - t.pPrime - t.qPrime + 1.0;
}

TiltedRates tilt_constant(double A, const ModelParams& m) {
  const double s = std::sqrt(A * A + 4.0 * m.p * m.q);
  double c;
  if (A >= 0.0) {
    c = (A + s) / (2.0 * m.p);
  } else {
    if (m.q == 0.0) throw std::domain_error("TASEP tilt undefined for A <= 0");
    c = 2.0 * m.q / (s - A);
  }
  if (!(c > 0.0)) throw std::domain_error("TASEP tilt undefined for A <= 0");
  return {m.p * c, m.q / c, c};
}

double relative_entropy_K(const Profile& profile, const ModelParams& m, double lo, double hi) {
  double total = 0.0;
  for (const auto& pc : profile.pieces(lo, hi)) {
    total += entropy_of_linear_piece(pc.d0, pc.d1, pc.x1 - pc.x0, m.rho);
  }
  return total;
}

double jv_step_cost(double L, double R) {
  if (!(L <= 1.0 && R >= 0.0 && L >= R)) throw std::domain_error("jv_step_cost requires 1 >= L >= R >= 0");
  double v = L - R;
  if (R > 0.0) v += L * R * std::log(R / L);
  if (L < 1.0) v += (1.0 - L) * (1.0 - R) * std::log((1.0 - L) / (1.0 - R));
  return v;
}

double lower_bound_J1(double A, const ModelParams& m) {
  if (!(A > 0.0 && A < m.lln_velocity())) throw std::domain_error("J1 requires 0 < A < gamma(1-rho)");
  return m.gamma * entropy_density(1.0 - A / m.gamma, m.rho);
}

double lower_bound_J2(double A, const ModelParams& m) {
  if (!(A < 0.0)) throw std::domain_error("J2 requires A < 0");
  if (m.gamma >= 1.0) throw std::domain_error("J2 requires gamma < 1");
  return (A - m.gamma) * std::log(1.0 - m.rho) + rate_IZ(A, m);
}

double flux_G(double z, const ModelParams& m) {
  const double g = m.gamma;
  if (z < -g) return 0.0;
  if (z > g) return z;
  const double w = 1.0 + z / g;
  return 0.25 * g * w * w;
}

double flux_L(double r, const ModelParams& m) {
  if (r < 0.0 || r > 1.0) return kInfiniteCost;
  return -m.gamma * r * (1.0 - r);
}

}  // namespace asep
