#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "asep/profile.hpp"

namespace asep {

struct ModelParams {
  double p = 1.0;
  double q = 0.0;
  double gamma = 1.0;
  double rho = 0.5;

  // Validates p in (1/2, 1] and rho in (0, 1); q and gamma are derived.
  static ModelParams make(double p, double rho);

  bool tasep() const { return q == 0.0; }
  double lln_velocity() const { return gamma * (1.0 - rho); }
};

struct TiltedRates {
  double pPrime;
  double qPrime;
  double c;
};

enum class StrategyRegime { UpperFar, UpperNear, LowerNonentropic, LowerMid, LowerNeg };

std::string_view to_string(StrategyRegime r);
StrategyRegime regime_from_string(std::string_view s);
std::ostream& operator<<(std::ostream& os, StrategyRegime r);

bool regime_admits(StrategyRegime r, double A, const ModelParams& params);
// Picks the regime whose velocity range contains A; TASEP with 0 <= A < 1-rho maps to LowerNonentropic.
StrategyRegime classify_regime(double A, const ModelParams& params);

double rate_I_gamma(double A, const ModelParams& params);
// Closed-form branches of I_gamma: near for gamma(1-rho) < A < gamma, far for A >= gamma.
double rate_I_gamma_near(double A, const ModelParams& params);
double rate_I_gamma_far(double A, const ModelParams& params);
double rate_poisson(double a, double rho, double t);
double rate_IZ(double A, const ModelParams& params);
TiltedRates tilt_constant(double A, const ModelParams& params);
double relative_entropy_K(const Profile& profile, const ModelParams& params, double lo, double hi);
double jv_step_cost(double L, double R);
double lower_bound_J1(double A, const ModelParams& params);
double lower_bound_J2(double A, const ModelParams& params);
double flux_G(double z, const ModelParams& params);
double flux_L(double r, const ModelParams& params);

// Velocity A_eps used by the regime's initial profile.
double profile_velocity(StrategyRegime r, double A, double eps);

// Tilted initial profile of the regime. A_eps conventions:
//   UpperFar          vacuum on [0, A-gamma+eps), tagged tilt at A+eps/2
//   UpperNear         A_eps = A+eps
//   LowerMid          A_eps = A(1-eps)
//   LowerNonentropic  A_eps = A(1-eps)
//   LowerNeg          vacuum on [A-gamma-eps, 0), tagged tilt at A-eps/2
Profile build_strategy_profile(StrategyRegime r, double A, double eps, const ModelParams& params);

// Profile plus the tagged-particle rate tilt the regime prescribes.
struct StrategyPlan {
  StrategyRegime regime;
  double A;
  double eps;
  Profile profile;
  std::optional<TiltedRates> tilt;
  // Macroscopic velocity of the tagged particle under the tilted law.
  double typicalVelocity;
};

StrategyPlan strategy_plan(StrategyRegime r, double A, double eps, const ModelParams& params);

// Window outside of which the regime profile equals rho.
std::pair<double, double> strategy_support(const Profile& profile);

struct RateRow {
  double A;
  double Igamma;
  double IZ;
  double K;
  double J1;
  double J2;
};

std::vector<RateRow> tabulate_rates(const ModelParams& params, const std::vector<double>& As);
void write_rates_csv(std::ostream& os, const std::vector<RateRow>& rows);

}  // namespace asep
