#pragma once

#include <cstdint>
#include <vector>

#include "asep/config.hpp"
#include "asep/profile.hpp"

namespace asep {

struct LlnRow {
  std::int64_t N = 0;
  std::int64_t trajectories = 0;
  double predicted = 0.0;
  double mean = 0.0;  // of X_N / N
  double q05 = 0.0;   // quantiles of X_N / N - predicted
  double q50 = 0.0;
  double q95 = 0.0;
  double tolerance = 0.0;
  double fractionWithin = 0.0;
  std::int64_t boundaryViolations = 0;
};

// X_N / N against gamma(1-rho) (equilibrium), gamma (step lead particle) or the strategy velocity.
std::vector<LlnRow> lln_check(const ExperimentConfig& config);

struct PoissonBin {
  std::int64_t lo = 0;
  std::int64_t hi = 0;  // inclusive; the last bin is open-ended
  std::int64_t observed = 0;
  double expected = 0.0;
};

struct PoissonLawReport {
  double t = 0.0;
  std::int64_t trajectories = 0;
  double mean = 0.0;
  double variance = 0.0;
  double meanRatio = 0.0;      // mean / ((1-rho) t)
  double varianceRatio = 0.0;  // variance / mean
  double chiSquare = 0.0;
  int degreesOfFreedom = 0;
  double pValue = 0.0;
  double incrementCorrelation = 0.0;  // corr(X_t - X_{t/2}, X_{t/2})
  double incrementCorrelationStdError = 0.0;
  std::vector<PoissonBin> bins;
  std::int64_t boundaryViolations = 0;
};

// Pearson chi-square against Poisson(mean); adjacent bins pooled until each expects >= 5.
PoissonLawReport chi_square_poisson(const std::vector<std::int64_t>& samples, double mean);
PoissonLawReport poisson_law_test(const ExperimentConfig& config);

struct CumulantRow {
  std::int64_t N = 0;
  double lambda = 0.0;
  double cumulant = 0.0;  // (1/N) ln mean exp(lambda X_N)
  double poissonOracle = 0.0;  // (1-rho)(e^lambda - 1) for TASEP, NaN otherwise
};

struct CumulantSummary {
  std::int64_t N = 0;
  double A = 0.0;
  double legendre = 0.0;  // sup over the grid of lambda A - cumulant, an upper-bound diagnostic
  double argLambda = 0.0;
  bool convex = true;
  bool overflowGuard = false;
};

struct CumulantReport {
  std::vector<CumulantRow> rows;
  std::vector<CumulantSummary> summaries;
};

std::vector<double> empirical_cumulant(const std::vector<std::int64_t>& X, std::int64_t N,
                                       const std::vector<double>& lambdas);
double legendre_on_grid(const std::vector<double>& lambdas, const std::vector<double>& values, double A,
                        double* argLambda = nullptr);
CumulantReport estimate_cumulant(const std::vector<double>& lambdaGrid, const ExperimentConfig& config);

struct FluxPoint {
  double t = 0.0;
  double L = 0.0;
  double profileReference = 0.0;  // v(t, L) from the macroscopic initial profile
  std::int64_t violations = 0;
  std::int64_t sanityViolations = 0;
};

inline constexpr double kFluxSanityEps = -0.5;

struct FluxReport {
  std::int64_t N = 0;
  std::int64_t trajectories = 0;
  StartKind start = StartKind::Equilibrium;
  FluxReference reference = FluxReference::Empirical;
  double epsTest = 0.0;
  std::int64_t trajectoriesWithViolation = 0;
  std::int64_t totalViolations = 0;
  double violationFrequency = 0.0;  // per trajectory
  std::int64_t sanityTrajectoriesWithViolation = 0;
  double sanityFrequency = 0.0;
  std::vector<FluxPoint> points;
};

// Density of the configuration as a step profile on cells [x/N, (x+1)/N), zero outside.
Profile configuration_profile(const LatticeState& state);
// profile on [a, b), zero outside.
Profile truncate_profile(const Profile& profile, double a, double b);

FluxReport flux_dominance_check(const ExperimentConfig& config, std::int64_t N);

struct SlowedHoleRow {
  std::int64_t N = 0;
  std::int64_t trajectories = 0;
  double fractionPinned = 0.0;  // X_N = 0
  double meanHoleDisplacement = 0.0;  // (h_N - h_0) / N
  std::int64_t boundaryViolations = 0;
};

std::vector<SlowedHoleRow> slowed_hole_check(const ExperimentConfig& config);

}  // namespace asep
