#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asep/csv.hpp"
#include "asep/numeric.hpp"
#include "asep/variational.hpp"

namespace asep {

void PiecewiseFn::add_poly(double x0, double x1, double c0, double c1, double c2) {
  if (!(x1 > x0)) return;
  segs_.push_back({x0, x1, false, c0, c1, c2, nullptr, nullptr});
}

void PiecewiseFn::add_analytic(double x0, double x1, std::function<double(double)> f,
                               std::function<double(double)> df) {
  if (!(x1 > x0)) return;
  segs_.push_back({x0, x1, true, 0.0, 0.0, 0.0, std::move(f), std::move(df)});
}

PiecewiseFn PiecewiseFn::polyline(const std::vector<double>& us, const std::vector<double>& vs) {
  if (us.size() != vs.size() || us.size() < 2) throw std::invalid_argument("polyline needs matching knot lists");
  PiecewiseFn fn;
  for (std::size_t i = 0; i + 1 < us.size(); ++i) {
    fn.add_poly(us[i], us[i + 1], vs[i], (vs[i + 1] - vs[i]) / (us[i + 1] - us[i]));
  }
  return fn;
}

const PiecewiseFn::Segment& PiecewiseFn::find(double u) const {
  if (segs_.empty()) throw std::logic_error("empty piecewise function");
  auto it = std::upper_bound(segs_.begin(), segs_.end(), u, [](double x, const Segment& s) { return x < s.x0; });
  if (it == segs_.begin()) return segs_.front();
  return *(it - 1);
}

double PiecewiseFn::operator()(double u) const {
  const Segment& s = find(u);
  if (s.analytic) return s.f(u);
  const double x = u - s.x0;
  return s.c0 + s.c1 * x + s.c2 * x * x;
}

double PiecewiseFn::derivative(double u) const {
  const Segment& s = find(u);
  if (s.analytic) return s.df(u);
  return s.c1 + 2.0 * s.c2 * (u - s.x0);
}

std::vector<double> PiecewiseFn::junctions() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < segs_.size(); ++i) out.push_back(segs_[i].x0);
  return out;
}

double cost_K(const PiecewiseFn& v, const ModelParams& m) {
  constexpr double tol = 1e-9;
  double total = 0.0;
  for (const auto& s : v.segments()) {
    const double L = s.x1 - s.x0;
    if (s.analytic) {
      const auto& df = s.df;
      auto integrand = [&](double u) {
        const double d = df(u);
        if (d < -tol || d > 1.0 + tol) throw std::domain_error("cost_K: slope outside [0,1]");
        return entropy_density(std::clamp(d, 0.0, 1.0), m.rho);
      };
      total += adaptive_simpson(integrand, s.x0, s.x1, 1e-10);
    } else {
      const double d0 = s.c1;
      const double d1 = s.c1 + 2.0 * s.c2 * L;
      if (std::min(d0, d1) < -tol || std::max(d0, d1) > 1.0 + tol)
        throw std::domain_error("cost_K: slope outside [0,1]");
      total += entropy_of_linear_piece(std::clamp(d0, 0.0, 1.0), std::clamp(d1, 0.0, 1.0), L, m.rho);
    }
  }
  return total;
}

PiecewiseFn analytic_minimizer(Problem problem, double A, const ModelParams& m) {
  const double g = m.gamma;
  const double rho = m.rho;
  const double zRho = g * (2.0 * rho - 1.0) + A;
  // G(u - A) on [A - gamma, A + gamma] as a quadratic based at x0.
  auto obstacle_poly = [&](PiecewiseFn& fn, double x0, double x1) {
    const double w = x0 - A + g;
    fn.add_poly(x0, x1, w * w / (4.0 * g), w / (2.0 * g), 1.0 / (4.0 * g));
  };
  PiecewiseFn fn;
  if (problem == Problem::One) {
    if (!(A >= g)) throw std::domain_error("Problem One requires A >= gamma");
    fn.add_poly(0.0, A - g, 0.0, 0.0, 0.0);
    obstacle_poly(fn, A - g, zRho);
    fn.add_poly(zRho, A + g, g * rho * rho, rho, 0.0);
  } else {
    if (!(A > m.lln_velocity() && A < g)) throw std::domain_error("Problem Two requires gamma(1-rho) < A < gamma");
    const double yTan = g - A;
    const double slope = 1.0 - A / g;
    fn.add_poly(0.0, yTan, 0.0, slope, 0.0);
    obstacle_poly(fn, yTan, zRho);
    fn.add_poly(zRho, A + g, g * rho * rho, rho, 0.0);
  }
  return fn;
}

void write_minimizer_csv(std::ostream& os, const PiecewiseFn& v, const ObstacleSpec& spec, double step) {
  CsvWriter w(os);
  w.row({"u", "v", "H"});
  const double lo = std::max(v.start(), spec.a);
  const double hi = std::min(v.end(), spec.b);
  const auto n = static_cast<long>(std::ceil((hi - lo) / step));
  for (long i = 0; i <= n; ++i) {
    const double u = std::min(hi, lo + static_cast<double>(i) * step);
    w.row({format_double(u), format_double(v(u)), format_double(spec.H(u))});
  }
}

}  // namespace asep
