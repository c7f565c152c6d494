#pragma once

#include <cstdint>
#include <optional>

#include "asep/config.hpp"
#include "asep/model.hpp"

namespace asep {

// P(Poisson((1-rho)N) >= ceil(AN)) for the upper side, P(... <= floor(AN)) for the lower side.
double log_exact_poisson_tail(double A, double rho, std::int64_t N, TailSide side);
double exact_poisson_tail(double A, double rho, std::int64_t N, TailSide side);
// Same, rejecting gamma < 1.
double exact_poisson_tail(double A, const ModelParams& params, std::int64_t N, TailSide side);

// Smallest integer X with X/N >= A, largest with X/N <= A.
std::int64_t upper_threshold(double A, std::int64_t N);
std::int64_t lower_threshold(double A, std::int64_t N);
bool in_event(std::int64_t X, double A, std::int64_t N, TailSide side);

struct TailEstimate {
  std::int64_t N = 0;
  std::int64_t trajectories = 0;
  std::int64_t hits = 0;
  double pHat = 0.0;
  double stdError = 0.0;
  double ciLo = 0.0;
  double ciHi = 0.0;
  double rateHat = 0.0;
  // Importance sampling only: ESS of the estimator summands w*1{E}, ESS of the raw weights,
  // frequency of the event under the tilted law, slack used.
  std::optional<double> effectiveSampleSize;
  std::optional<double> rawWeightEss;
  std::optional<double> qFrequency;
  std::optional<double> eps;
  bool upperBoundOnly = false;
  bool lowHitWarning = false;
  bool degenerateWeights = false;
  std::int64_t boundaryViolations = 0;
};

// Builds an estimate from per-trajectory summands (plain indicators for direct sampling).
TailEstimate summarize_tail(std::int64_t N, const std::vector<double>& summands, std::int64_t hits,
                            bool importance);

TailEstimate estimate_tail_direct(const ExperimentConfig& config, std::int64_t N);
TailEstimate estimate_tail_importance(const ExperimentConfig& config, std::int64_t N);
TailEstimate estimate_tail_importance(const ExperimentConfig& config, std::int64_t N, double eps);

}  // namespace asep
