#include <cmath>
#include <stdexcept>
#include <string>

#include "asep/csv.hpp"
#include "asep/model.hpp"
#include "asep/numeric.hpp"

namespace asep {

std::string_view to_string(StrategyRegime r) {
  switch (r) {
    case StrategyRegime::UpperFar: return "UpperFar";
    case StrategyRegime::UpperNear: return "UpperNear";
    case StrategyRegime::LowerNonentropic: return "LowerNonentropic";
    case StrategyRegime::LowerMid: return "LowerMid";
    case StrategyRegime::LowerNeg: return "LowerNeg";
  }
  return "?";
}

StrategyRegime regime_from_string(std::string_view s) {
  for (auto r : {StrategyRegime::UpperFar, StrategyRegime::UpperNear, StrategyRegime::LowerNonentropic,
                 StrategyRegime::LowerMid, StrategyRegime::LowerNeg}) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown regime: " + std::string(s));
}

std::ostream& operator<<(std::ostream& os, StrategyRegime r) { return os << to_string(r); }

bool regime_admits(StrategyRegime r, double A, const ModelParams& m) {
  const double v = m.lln_velocity();
  switch (r) {
    case StrategyRegime::UpperFar: return A >= m.gamma;
    case StrategyRegime::UpperNear: return A > v && A < m.gamma;
    case StrategyRegime::LowerNonentropic: return m.gamma == 1.0 && A >= 0.0 && A < v;
    case StrategyRegime::LowerMid: return A > 0.0 && A < v;
    case StrategyRegime::LowerNeg: return A < 0.0 && m.gamma < 1.0;
  }
  return false;
}

StrategyRegime classify_regime(double A, const ModelParams& m) {
  if (regime_admits(StrategyRegime::UpperFar, A, m)) return StrategyRegime::UpperFar;
  if (regime_admits(StrategyRegime::UpperNear, A, m)) return StrategyRegime::UpperNear;
  if (regime_admits(StrategyRegime::LowerNonentropic, A, m)) return StrategyRegime::LowerNonentropic;
  if (regime_admits(StrategyRegime::LowerMid, A, m)) return StrategyRegime::LowerMid;
  if (regime_admits(StrategyRegime::LowerNeg, A, m)) return StrategyRegime::LowerNeg;
  throw std::domain_error("no strategy regime covers A = " + format_double(A));
}

double profile_velocity(StrategyRegime r, double A, double eps) {
  switch (r) {
    case StrategyRegime::UpperFar: return A + 0.5 * eps;
    case StrategyRegime::UpperNear: return A + eps;
    case StrategyRegime::LowerNonentropic:
    case StrategyRegime::LowerMid: return A * (1.0 - eps);
    case StrategyRegime::LowerNeg: return A - 0.5 * eps;
  }
  return A;
}

Profile build_strategy_profile(StrategyRegime r, double A, double eps, const ModelParams& m) {
  if (!regime_admits(r, A, m))
    throw std::domain_error(std::string("velocity not admissible for regime ") + std::string(to_string(r)));
  if (!(eps >= 0.0)) throw std::domain_error("eps must be nonnegative");
  const double g = m.gamma;
  const double rho = m.rho;
  switch (r) {
    case StrategyRegime::UpperFar: {
      const double x = A - g + eps;
      return Profile({{0.0, 0.0}, {x, 0.0}, {x + 2.0 * rho * g, rho}}, rho, rho);
    }
    case StrategyRegime::UpperNear: {
      if (!(eps < g - A)) throw std::domain_error("UpperNear requires eps < gamma - A");
      const double ae = A + eps;
      const double d = 1.0 - ae / g;
      return Profile({{0.0, d}, {g - ae, d}, {ae - g + 2.0 * rho * g, rho}}, rho, rho);
    }
    case StrategyRegime::LowerNonentropic: {
      if (!(eps < 1.0)) throw std::domain_error("LowerNonentropic requires eps < 1");
      const double d = 1.0 - A * (1.0 - eps);
      return Profile({{0.0, d}, {rho, d}, {rho, rho}}, rho, rho);
    }
    case StrategyRegime::LowerMid: {
      if (!(eps < 1.0)) throw std::domain_error("LowerMid requires eps < 1");
      const double d = 1.0 - A * (1.0 - eps) / g;
      return Profile({{0.0, d}, {g, d}, {g, rho}}, rho, rho);
    }
    case StrategyRegime::LowerNeg: {
      const double x = A - g - eps;
      return Profile({{x, 0.0}, {0.0, 0.0}, {0.0, rho}}, rho, rho);
    }
  }
  throw std::logic_error("unreachable");
}

StrategyPlan strategy_plan(StrategyRegime r, double A, double eps, const ModelParams& m) {
  StrategyPlan plan{r, A, eps, build_strategy_profile(r, A, eps, m), std::nullopt,
                    profile_velocity(r, A, eps)};
  if (r == StrategyRegime::UpperFar || r == StrategyRegime::LowerNeg) {
    const double target = profile_velocity(r, A, eps);
    plan.tilt = tilt_constant(target, m);
  }
  return plan;
}

std::pair<double, double> strategy_support(const Profile& profile) {
  if (profile.knots().empty()) return {0.0, 0.0};
  return {profile.first_knot(), profile.last_knot()};
}

std::vector<RateRow> tabulate_rates(const ModelParams& m, const std::vector<double>& As) {
  const double nan = std::nan("");
  std::vector<RateRow> rows;
  rows.reserve(As.size());
  for (double A : As) {
    RateRow row{A, nan, rate_IZ(A, m), nan, nan, nan};
    if (A > m.lln_velocity()) row.Igamma = rate_I_gamma(A, m);
    if (A > 0.0 && A < m.lln_velocity()) row.J1 = lower_bound_J1(A, m);
    if (A < 0.0 && m.gamma < 1.0) row.J2 = lower_bound_J2(A, m);
    if (A != m.lln_velocity()) {
      try {
        const StrategyRegime r = classify_regime(A, m);
        const Profile prof = build_strategy_profile(r, A, 0.0, m);
        const auto [lo, hi] = strategy_support(prof);
        row.K = relative_entropy_K(prof, m, lo, hi);
      } catch (const std::domain_error&) {
      }
    }
    rows.push_back(row);
  }
  return rows;
}

void write_rates_csv(std::ostream& os, const std::vector<RateRow>& rows) {
  CsvWriter w(os);
  w.row({"A", "I_gamma", "I_Z", "K", "J1", "J2"});
  for (const auto& r : rows) {
    w.row({format_double(r.A), format_double(r.Igamma), format_double(r.IZ), format_double(r.K),
           format_double(r.J1), format_double(r.J2)});
  }
}

}  // namespace asep
