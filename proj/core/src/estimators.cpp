#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "asep/estimators.hpp"
#include "asep/lattice.hpp"
#include "asep/numeric.hpp"
#include "asep/parallel.hpp"
#include "asep/simulate.hpp"

namespace asep {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr std::uint64_t kDirectTag = 11;
constexpr std::uint64_t kImportanceTag = 12;

double log_poisson_pmf(std::int64_t k, double lambda) {
  return -lambda + static_cast<double>(k) * std::log(lambda) - std::lgamma(static_cast<double>(k) + 1.0);
}

struct Sample {
  std::int64_t X = 0;
  double logLR = 0.0;
  bool violation = false;
};

}  // namespace

std::int64_t upper_threshold(double A, std::int64_t N) {
  return static_cast<std::int64_t>(std::ceil(A * static_cast<double>(N) - 1e-9));
}

std::int64_t lower_threshold(double A, std::int64_t N) {
  return static_cast<std::int64_t>(std::floor(A * static_cast<double>(N) + 1e-9));
}

bool in_event(std::int64_t X, double A, std::int64_t N, TailSide side) {
  return side == TailSide::Upper ? X >= upper_threshold(A, N) : X <= lower_threshold(A, N);
}

double log_exact_poisson_tail(double A, double rho, std::int64_t N, TailSide side) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0, 1)");
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  const double lambda = (1.0 - rho) * static_cast<double>(N);
  const double logLambda = std::log(lambda);
  const double ninf = -std::numeric_limits<double>::infinity();
  if (side == TailSide::Upper) {
    const std::int64_t k0 = std::max<std::int64_t>(0, upper_threshold(A, N));
    if (k0 == 0) return 0.0;
    double term = log_poisson_pmf(k0, lambda);
    double acc = ninf;
    for (std::int64_t k = k0;; ++k) {
      if (k > k0) term += logLambda - std::log(static_cast<double>(k));
      acc = log_sum_exp(acc, term);
      if (static_cast<double>(k) > lambda && term < acc - 40.0) break;
    }
    return std::min(acc, 0.0);
  }
  const std::int64_t k1 = lower_threshold(A, N);
  if (k1 < 0) return ninf;
  double term = log_poisson_pmf(k1, lambda);
  double acc = ninf;
  for (std::int64_t k = k1; k >= 0; --k) {
    if (k < k1) term -= logLambda - std::log(static_cast<double>(k + 1));
    acc = log_sum_exp(acc, term);
    if (static_cast<double>(k) < lambda && term < acc - 40.0) break;
  }
  return std::min(acc, 0.0);
}

double exact_poisson_tail(double A, double rho, std::int64_t N, TailSide side) {
  return std::exp(log_exact_poisson_tail(A, rho, N, side));
}

double exact_poisson_tail(double A, const ModelParams& params, std::int64_t N, TailSide side) {
  if (!params.tasep()) throw std::domain_error("exact Poisson tail requires TASEP (gamma = 1)");
  return exact_poisson_tail(A, params.rho, N, side);
}

TailEstimate summarize_tail(std::int64_t N, const std::vector<double>& summands, std::int64_t hits,
                            bool importance) {
  TailEstimate e;
  e.N = N;
  e.trajectories = static_cast<std::int64_t>(summands.size());
  e.hits = hits;
  const double M = static_cast<double>(summands.size());
  double sum = 0.0, sumSq = 0.0;
  for (double s : summands) {
    sum += s;
    sumSq += s * s;
  }
  const double mean = sum / M;
  const double var = summands.size() > 1 ? std::max(0.0, (sumSq - M * mean * mean) / (M - 1.0)) : 0.0;
  e.stdError = std::sqrt(var / M);
  e.lowHitWarning = hits < 10;
  if (importance) {
    e.effectiveSampleSize = sumSq > 0.0 ? sum * sum / sumSq : 0.0;
    e.qFrequency = static_cast<double>(hits) / M;
    e.degenerateWeights = hits == 0 || *e.effectiveSampleSize < 10.0;
    e.pHat = std::clamp(mean, 0.0, 1.0);
  } else if (hits == 0) {
    e.pHat = std::min(1.0, 3.0 / M);
    e.upperBoundOnly = true;
  } else {
    e.pHat = mean;
  }
  if (e.upperBoundOnly) {
    e.ciLo = 0.0;
    e.ciHi = e.pHat;
  } else {
    e.ciLo = std::max(0.0, e.pHat - kZ95 * e.stdError);
    e.ciHi = std::min(1.0, e.pHat + kZ95 * e.stdError);
  }
  e.rateHat = e.pHat > 0.0 ? -std::log(e.pHat) / static_cast<double>(N) : std::numeric_limits<double>::infinity();
  return e;
}

TailEstimate estimate_tail_direct(const ExperimentConfig& config, std::int64_t N) {
  const ModelParams& m = config.params;
  const Window window = config.window_for(N);
  const Profile eq = Profile::constant(m.rho);
  const DynamicsSpec dyn = DynamicsSpec::bulk(m);
  const std::uint64_t family = derive_seed(config.seed, kDirectTag, static_cast<std::uint64_t>(N));
  SimOptions opts;
  opts.recordTaggedPath = false;
  const auto samples = parallel_map<Sample>(static_cast<std::size_t>(config.trajectories), [&](std::size_t i) {
    Rng rng(family, i);
    InitialSample init = sample_initial(eq, m.rho, N, window, rng);
    Trajectory tr = simulate(init.state, dyn, 1.0, rng, opts);
    return Sample{tr.displacement(), 0.0, tr.boundaryViolation};
  });
  std::vector<double> summands(samples.size());
  std::int64_t hits = 0, violations = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool hit = in_event(samples[i].X, config.A, N, config.side);
    summands[i] = hit ? 1.0 : 0.0;
    hits += hit;
    violations += samples[i].violation;
  }
  TailEstimate e = summarize_tail(N, summands, hits, false);
  e.boundaryViolations = violations;
  return e;
}

TailEstimate estimate_tail_importance(const ExperimentConfig& config, std::int64_t N) {
  return estimate_tail_importance(config, N, config.eps);
}

TailEstimate estimate_tail_importance(const ExperimentConfig& config, std::int64_t N, double eps) {
  const ModelParams& m = config.params;
  const StrategyRegime regime = config.resolved_regime();
  if (!regime_admits(regime, config.A, m)) throw std::domain_error("regime does not admit A");
  const Window window = config.window_for(N);
  const std::uint64_t family = derive_seed(config.seed, kImportanceTag, static_cast<std::uint64_t>(N));
  SimOptions opts;
  opts.recordTaggedPath = false;
  std::vector<Sample> samples;
  if (regime == StrategyRegime::LowerNonentropic) {
    if (config.A != 0.0) throw std::domain_error("LowerNonentropic importance sampling requires A = 0");
    samples = parallel_map<Sample>(static_cast<std::size_t>(config.trajectories), [&](std::size_t i) {
      Rng rng(family, i);
      SlowedHoleResult r = simulate_slowed_hole(N, m.rho, eps, rng, window, opts);
      const Trajectory& tr = r.trajectory;
      return Sample{tr.displacement(), tr.log_likelihood_ratio(), tr.boundaryViolation};
    });
  } else {
    const StrategyPlan plan = strategy_plan(regime, config.A, eps, m);
    const Profile sampling = config.vacuumFloor > 0.0 ? floored(plan.profile, config.vacuumFloor) : plan.profile;
    const DynamicsSpec dyn = plan.tilt ? DynamicsSpec::tilted(m, *plan.tilt) : DynamicsSpec::bulk(m);
    samples = parallel_map<Sample>(static_cast<std::size_t>(config.trajectories), [&](std::size_t i) {
      Rng rng(family, i);
      InitialSample init = sample_initial(sampling, m.rho, N, window, rng);
      Trajectory tr = simulate(init.state, dyn, 1.0, rng, opts);
      return Sample{tr.displacement(), -init.logWeight - tr.logDynamicWeight, tr.boundaryViolation};
    });
  }
  std::vector<double> summands(samples.size());
  std::int64_t hits = 0, violations = 0;
  double maxLog = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) maxLog = std::max(maxLog, s.logLR);
  double rawSum = 0.0, rawSq = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool hit = in_event(samples[i].X, config.A, N, config.side);
    summands[i] = hit ? std::exp(samples[i].logLR) : 0.0;
    hits += hit;
    violations += samples[i].violation;
    const double w = std::exp(samples[i].logLR - maxLog);
    rawSum += w;
    rawSq += w * w;
  }
  TailEstimate e = summarize_tail(N, summands, hits, true);
  e.rawWeightEss = rawSq > 0.0 ? rawSum * rawSum / rawSq : 0.0;
  e.eps = eps;
  e.boundaryViolations = violations;
  return e;
}

}  // namespace asep
