#include <cmath>
#include <stdexcept>
#include <string>

#include "asep/numeric.hpp"
#include "asep/variational.hpp"

namespace asep {

namespace {
constexpr double kZeroTol = 1e-10;
}

void ObstacleSpec::validate(double gridStep) const {
  if (!(b > a)) throw std::invalid_argument("obstacle interval must satisfy a < b");
  if (!H || !dH) throw std::invalid_argument("obstacle needs value and derivative evaluators");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0,1)");
  const auto n = static_cast<long>(std::ceil((b - a) / gridStep));
  const double h = (b - a) / static_cast<double>(n);
  double prev = H(a);
  if (prev < -kZeroTol) throw std::invalid_argument("obstacle must be nonnegative");
  for (long i = 1; i <= n; ++i) {
    const double u = a + static_cast<double>(i) * h;
    const double cur = H(u);
    if (cur < -kZeroTol) throw std::invalid_argument("obstacle must be nonnegative");
    if (!(cur > prev)) throw std::invalid_argument("obstacle must be strictly increasing");
    const double mid = H(u - 0.5 * h);
    if (mid > 0.5 * (prev + cur) + 1e-12) throw std::invalid_argument("obstacle must be convex");
    prev = cur;
  }
}

ObstacleSpec problem_obstacle(Problem problem, double A, const ModelParams& m) {
  ObstacleSpec s;
  const double g = m.gamma;
  s.rho = m.rho;
  s.b = A + g;
  if (problem == Problem::One) {
    if (!(A >= g)) throw std::domain_error("Problem One requires A >= gamma");
    s.a = A - g;
  } else {
    if (!(A > m.lln_velocity() && A < g)) throw std::domain_error("Problem Two requires gamma(1-rho) < A < gamma");
    s.a = 0.0;
  }
  s.H = [m, A](double u) { return flux_G(u - A, m); };
  s.dH = [m, A](double u) {
    const double z = u - A;
    if (z < -m.gamma) return 0.0;
    if (z > m.gamma) return 1.0;
    return 0.5 * (1.0 + z / m.gamma);
  };
  return s;
}

CriticalPoints critical_points(const ObstacleSpec& s) {
  CriticalPoints cp;
  const double da = s.dH(s.a);
  const double db = s.dH(s.b);
  if (da <= s.rho && db >= s.rho) {
    cp.zRho = bisect([&](double u) { return s.dH(u) - s.rho; }, s.a, s.b, 1e-12);
  }
  auto g = [&](double u) { return s.dH(u) * (u - s.a) - s.H(u); };
  if (s.H(s.a) <= kZeroTol) {
    cp.yTan = s.a;
  } else if (g(s.b) >= 0.0) {
    cp.yTan = bisect(g, s.a, s.b, 1e-12);
  }
  return cp;
}

std::string_view to_string(MinimizerCase c) {
  switch (c) {
    case MinimizerCase::ZeroCost: return "ZeroCost";
    case MinimizerCase::ObstacleThenSlope: return "ObstacleThenSlope";
    case MinimizerCase::Obstacle: return "Obstacle";
    case MinimizerCase::TangentObstacleSlope: return "TangentObstacleSlope";
  }
  return "?";
}

MinimizerCase detect_minimizer_case(const ObstacleSpec& s) {
  const CriticalPoints cp = critical_points(s);
  const bool hZero = s.H(s.a) <= kZeroTol;
  const double da = s.dH(s.a);
  const double db = s.dH(s.b);

  // Minimum of the convex gap H(u) - rho(u - a).
  double gapMin;
  if (cp.zRho) {
    gapMin = s.H(*cp.zRho) - s.rho * (*cp.zRho - s.a);
  } else {
    gapMin = std::min(s.H(s.a), s.H(s.b) - s.rho * (s.b - s.a));
  }
  const bool c1 = gapMin >= -kZeroTol;
  const bool c2 = hZero && da < s.rho && cp.zRho && *cp.zRho < s.b;
  const bool c3 = hZero && db <= s.rho;
  const bool c4 = !hZero && da < s.rho && cp.yTan && cp.zRho && *cp.yTan < *cp.zRho - kZeroTol && *cp.zRho < s.b;

  const int count = int(c1) + int(c2) + int(c3) + int(c4);
  if (count != 1) {
    throw std::domain_error("obstacle is outside the four covered minimizer cases (" + std::to_string(count) +
                            " case conditions hold)");
  }
  if (c1) return MinimizerCase::ZeroCost;
  if (c2) return MinimizerCase::ObstacleThenSlope;
  if (c3) return MinimizerCase::Obstacle;
  return MinimizerCase::TangentObstacleSlope;
}

PiecewiseFn general_minimizer(const ObstacleSpec& s, MinimizerCase* detected) {
  const MinimizerCase c = detect_minimizer_case(s);
  if (detected) *detected = c;
  const CriticalPoints cp = critical_points(s);
  PiecewiseFn fn;
  const auto H = s.H;
  const auto dH = s.dH;
  switch (c) {
    case MinimizerCase::ZeroCost:
      fn.add_poly(s.a, s.b, 0.0, s.rho, 0.0);
      break;
    case MinimizerCase::ObstacleThenSlope: {
      const double z = *cp.zRho;
      fn.add_analytic(s.a, z, H, dH);
      fn.add_poly(z, s.b, H(z), s.rho, 0.0);
      break;
    }
    case MinimizerCase::Obstacle:
      fn.add_analytic(s.a, s.b, H, dH);
      break;
    case MinimizerCase::TangentObstacleSlope: {
      const double y = *cp.yTan;
      const double z = *cp.zRho;
      fn.add_poly(s.a, y, 0.0, H(y) / (y - s.a), 0.0);
      fn.add_analytic(y, z, H, dH);
      fn.add_poly(z, s.b, H(z), s.rho, 0.0);
      break;
    }
  }
  return fn;
}

}  // namespace asep
