#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asep/csv.hpp"
#include "asep/hydro.hpp"

namespace asep {

Profile closed_form_evolution(StrategyRegime r, double A, double eps, const ModelParams& m, double t) {
  if (!(t > 0.0 && t <= 1.0)) throw std::domain_error("closed-form evolutions are defined for 0 < t <= 1");
  (void)build_strategy_profile(r, A, eps, m);
  const double g = m.gamma;
  const double rho = m.rho;
  const double fanLeft = g * (1.0 - 2.0 * rho);
  switch (r) {
    case StrategyRegime::UpperFar: {
      const double a = A - g + eps;
      const double b = a + 2.0 * rho * g;
      return Profile({{fanLeft * t, rho}, {g * t, 0.0}, {a + g * t, 0.0}, {b + fanLeft * t, rho}}, rho, rho);
    }
    case StrategyRegime::UpperNear: {
      const double ae = A + eps;
      const double d = 1.0 - ae / g;
      const double ell = g - ae + (2.0 * ae - g) * t;
      const double rr = ae - g + 2.0 * rho * g + (1.0 - 2.0 * rho) * g * t;
      return Profile({{fanLeft * t, rho}, {(2.0 * ae - g) * t, d}, {ell, d}, {rr, rho}}, rho, rho);
    }
    case StrategyRegime::LowerMid: {
      const double ae = A * (1.0 - eps);
      const double d = 1.0 - ae / g;
      const double shock = (ae - g * rho) * t;
      return Profile({{shock, rho}, {shock, d}, {g + (2.0 * ae - g) * t, d}, {g + fanLeft * t, rho}}, rho, rho);
    }
    case StrategyRegime::LowerNeg: {
      const double x0 = A - g - eps;
      const double shock = g * (1.0 - rho) * t;
      return Profile({{x0 + fanLeft * t, rho}, {x0 + g * t, 0.0}, {shock, 0.0}, {shock, rho}}, rho, rho);
    }
    case StrategyRegime::LowerNonentropic:
      throw std::domain_error("LowerNonentropic has no entropic closed form; use nonentropic_block_evolution");
  }
  throw std::logic_error("unreachable");
}

Profile nonentropic_step_evolution(double L, double R, double t, const ModelParams& m, double x0) {
  if (m.gamma != 1.0) throw std::domain_error("nonentropic step evolution requires gamma = 1");
  if (!(L <= 1.0 && R >= 0.0 && L >= R)) throw std::domain_error("nonentropic step requires 1 >= L >= R >= 0");
  if (t < 0.0) throw std::domain_error("t must be nonnegative");
  const double x = x0 + (1.0 - L - R) * t;
  return Profile({{x, L}, {x, R}}, L, R);
}

Profile nonentropic_block_evolution(double A, double eps, const ModelParams& m, double t) {
  if (!regime_admits(StrategyRegime::LowerNonentropic, A, m))
    throw std::domain_error("nonentropic block requires gamma = 1 and 0 <= A < 1 - rho");
  const double ae = A * (1.0 - eps);
  const double shift = (ae - m.rho) * t;
  const double d = 1.0 - ae;
  return Profile({{shift, m.rho}, {shift, d}, {m.rho + shift, d}, {m.rho + shift, m.rho}}, m.rho, m.rho);
}

EvolutionDescriptor EvolutionDescriptor::closed_form(StrategyRegime r, double A, double eps, const ModelParams& m) {
  if (r == StrategyRegime::LowerNonentropic) throw std::domain_error("LowerNonentropic has no entropic closed form");
  EvolutionDescriptor e(Kind::ClosedForm, m);
  e.regime_ = r;
  e.A_ = A;
  e.eps_ = eps;
  e.v0_ = std::make_shared<CumulativeProfile>(build_strategy_profile(r, A, eps, m));
  return e;
}

EvolutionDescriptor EvolutionDescriptor::hopf_lax(const CumulativeProfile& v0, const ModelParams& m, double h) {
  EvolutionDescriptor e(Kind::HopfLaxGrid, m);
  e.h_ = h;
  e.v0_ = std::make_shared<CumulativeProfile>(v0);
  return e;
}

EvolutionDescriptor EvolutionDescriptor::nonentropic(double A, double eps, const ModelParams& m) {
  EvolutionDescriptor e(Kind::NonentropicStep, m);
  e.regime_ = StrategyRegime::LowerNonentropic;
  e.A_ = A;
  e.eps_ = eps;
  e.v0_ = std::make_shared<CumulativeProfile>(build_strategy_profile(StrategyRegime::LowerNonentropic, A, eps, m));
  return e;
}

Profile EvolutionDescriptor::profile_at(double t) const {
  if (t == 0.0) return v0_->density();
  switch (kind_) {
    case Kind::ClosedForm: return closed_form_evolution(regime_, A_, eps_, params_, t);
    case Kind::NonentropicStep: return nonentropic_block_evolution(A_, eps_, params_, t);
    case Kind::HopfLaxGrid: {
      const double g = params_.gamma;
      const double lo = v0_->first_knot() - g * t - 1.0;
      const double hi = v0_->last_knot() + g * t + 1.0;
      std::vector<double> grid;
      for (double u = lo; u <= hi; u += h_) grid.push_back(u);
      return entropic_density(*v0_, params_, t, grid, h_);
    }
  }
  throw std::logic_error("unreachable");
}

double EvolutionDescriptor::density(double t, double u) const {
  if (kind_ == Kind::HopfLaxGrid && t > 0.0) {
    const double d = (cumulative(t, u + h_) - cumulative(t, u - h_)) / (2.0 * h_);
    return std::clamp(d, 0.0, 1.0);
  }
  return profile_at(t)(u);
}

double EvolutionDescriptor::cumulative(double t, double u) const {
  if (t == 0.0) return (*v0_)(u);
  if (kind_ == Kind::HopfLaxGrid) return hopf_lax_value(*v0_, params_, t, u).value;
  const Profile p = profile_at(t);
  // Anchor far to the left where the solution is still the constant left tail.
  const double uL = std::min(v0_->first_knot(), p.knots().empty() ? 0.0 : p.first_knot()) - 1.0;
  const double dL = v0_->density().left_tail();
  const double flux = params_.gamma * dL * (1.0 - dL);
  if (u >= uL) return (*v0_)(uL) - flux * t + p.integral(uL, u);
  return (*v0_)(uL) - flux * t - p.integral(u, uL);
}

TaggedVelocity tagged_velocity(const EvolutionDescriptor& evo, double t) {
  const double level = evo.cumulative(0.0, 0.0);
  auto v = [&](double x) { return evo.cumulative(t, x); };
  double lo = -1.0;
  double hi = 1.0;
  for (int i = 0; i < 60 && v(lo) > level; ++i) lo *= 2.0;
  for (int i = 0; i < 60 && v(hi) < level; ++i) hi *= 2.0;
  if (v(lo) > level || v(hi) < level) throw std::domain_error("tagged_velocity: cumulative does not cross the level");
  // Smallest x with v(x) >= level and largest x with v(x) <= level.
  double a = lo, b = hi;
  while (b - a > 1e-12) {
    const double mid = 0.5 * (a + b);
    (v(mid) >= level ? b : a) = mid;
  }
  const double first = b;
  a = lo;
  b = hi;
  while (b - a > 1e-12) {
    const double mid = 0.5 * (a + b);
    (v(mid) <= level ? a : b) = mid;
  }
  const double last = a;
  TaggedVelocity out{0.5 * (first + last), last - first <= 1e-8, std::min(first, last), std::max(first, last)};
  return out;
}

TaggedVelocity tagged_velocity(const Profile& rho0, const ModelParams& m, double t) {
  return tagged_velocity(EvolutionDescriptor::hopf_lax(CumulativeProfile(rho0), m), t);
}

void write_evolution_csv(std::ostream& os, const EvolutionDescriptor& evo, const std::vector<double>& times,
                         const std::vector<double>& grid) {
  CsvWriter w(os);
  w.row({"t", "u", "density", "cumulative"});
  for (double t : times) {
    for (double u : grid) {
      w.row({format_double(t), format_double(u), format_double(evo.density(t, u)),
             format_double(evo.cumulative(t, u))});
    }
  }
}

}  // namespace asep
