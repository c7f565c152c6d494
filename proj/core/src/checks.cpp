#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "asep/checks.hpp"
#include "asep/hydro.hpp"
#include "asep/numeric.hpp"
#include "asep/parallel.hpp"
#include "asep/simulate.hpp"

namespace asep {

namespace {

constexpr std::uint64_t kLlnTag = 21;
constexpr std::uint64_t kPoissonTag = 22;
constexpr std::uint64_t kCumulantTag = 23;
constexpr std::uint64_t kFluxTag = 24;
constexpr std::uint64_t kSlowedHoleTag = 25;

double quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return std::nan("");
  const auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(sorted.size() - 1)));
  return sorted[idx];
}

double poisson_upper(std::int64_t k, double mean) {
  if (k <= 0) return 1.0;
  return boost::math::gamma_p(static_cast<double>(k), mean);
}

std::vector<std::int64_t> equilibrium_displacements(const ExperimentConfig& config, std::int64_t N,
                                                    std::uint64_t tag) {
  const ModelParams& m = config.params;
  const Window window = config.window_for(N);
  const Profile eq = Profile::constant(m.rho);
  const DynamicsSpec dyn = DynamicsSpec::bulk(m);
  const std::uint64_t family = derive_seed(config.seed, tag, static_cast<std::uint64_t>(N));
  SimOptions opts;
  opts.recordTaggedPath = false;
  return parallel_map<std::int64_t>(static_cast<std::size_t>(config.trajectories), [&](std::size_t i) {
    Rng rng(family, i);
    InitialSample init = sample_initial(eq, m.rho, N, window, rng);
    return simulate(init.state, dyn, 1.0, rng, opts).displacement();
  });
}

}  // namespace

std::vector<LlnRow> lln_check(const ExperimentConfig& config) {
  const ModelParams& m = config.params;
  std::vector<LlnRow> rows;
  for (std::int64_t N : config.Ns) {
    const Window window = config.window_for(N);
    const std::uint64_t family = derive_seed(config.seed, kLlnTag, static_cast<std::uint64_t>(N));
    Profile sampling = Profile::constant(m.rho);
    DynamicsSpec dyn = DynamicsSpec::bulk(m);
    double predicted = m.lln_velocity();
    if (config.start == StartKind::Step) {
      predicted = m.gamma;
    } else if (config.start == StartKind::Strategy) {
      const StrategyPlan plan = strategy_plan(config.resolved_regime(), config.A, config.eps, m);
      sampling = plan.profile;
      if (plan.tilt) dyn = DynamicsSpec::tilted(m, *plan.tilt);
      predicted = plan.typicalVelocity;
    }
    SimOptions opts;
    opts.recordTaggedPath = false;
    struct Out {
      double x;
      bool violation;
    };
    const auto outs = parallel_map<Out>(static_cast<std::size_t>(config.trajectories), [&](std::size_t i) {
      Rng rng(family, i);
      const LatticeState start = config.start == StartKind::Step
                                     ? step_configuration(N, window)
                                     : sample_initial(sampling, m.rho, N, window, rng).state;
      const Trajectory tr = simulate(start, dyn, 1.0, rng, opts);
      return Out{static_cast<double>(tr.displacement()) / static_cast<double>(N), tr.boundaryViolation};
    });
    LlnRow row;
    row.N = N;
    row.trajectories = config.trajectories;
    row.predicted = predicted;
    row.tolerance = config.tolerance;
    std::vector<double> dev;
    dev.reserve(outs.size());
    double sum = 0.0;
    std::int64_t within = 0;
    for (const auto& o : outs) {
      sum += o.x;
      dev.push_back(o.x - predicted);
      within += std::abs(o.x - predicted) <= config.tolerance;
      row.boundaryViolations += o.violation;
    }
    row.mean = sum / static_cast<double>(outs.size());
    row.fractionWithin = static_cast<double>(within) / static_cast<double>(outs.size());
    std::sort(dev.begin(), dev.end());
    row.q05 = quantile(dev, 0.05);
    row.q50 = quantile(dev, 0.5);
    row.q95 = quantile(dev, 0.95);
    rows.push_back(row);
  }
  return rows;
}

PoissonLawReport chi_square_poisson(const std::vector<std::int64_t>& samples, double mean) {
  if (samples.empty()) throw std::invalid_argument("chi_square_poisson requires samples");
  if (!(mean > 0.0)) throw std::invalid_argument("chi_square_poisson requires a positive mean");
  PoissonLawReport r;
  const double M = static_cast<double>(samples.size());
  std::int64_t kMax = 0;
  for (auto x : samples) {
    if (x < 0) throw std::invalid_argument("Poisson samples must be nonnegative");
    kMax = std::max(kMax, x);
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(kMax) + 2, 0);
  for (auto x : samples) ++counts[static_cast<std::size_t>(x)];
  auto observed_from = [&](std::int64_t lo) {
    std::int64_t o = 0;
    for (std::int64_t k = lo; k <= kMax; ++k) o += counts[static_cast<std::size_t>(k)];
    return o;
  };

  std::vector<PoissonBin> bins;
  PoissonBin cur;
  double logPmf = -mean;
  const double logMean = std::log(mean);
  for (std::int64_t k = 0;; ++k) {
    if (k > 0) logPmf += logMean - std::log(static_cast<double>(k));
    cur.expected += M * std::exp(logPmf);
    cur.observed += k <= kMax ? counts[static_cast<std::size_t>(k)] : 0;
    const double tailAfter = M * poisson_upper(k + 1, mean);
    if (tailAfter < 5.0) {
      cur.hi = std::numeric_limits<std::int64_t>::max();
      cur.expected = M * poisson_upper(cur.lo, mean);
      cur.observed = observed_from(cur.lo);
      bins.push_back(cur);
      break;
    }
    if (cur.expected >= 5.0) {
      cur.hi = k;
      bins.push_back(cur);
      cur = PoissonBin{};
      cur.lo = k + 1;
    }
  }
  if (bins.size() >= 2 && bins.back().expected < 5.0) {
    PoissonBin last = bins.back();
    bins.pop_back();
    bins.back().hi = last.hi;
    bins.back().expected += last.expected;
    bins.back().observed += last.observed;
  }
  double chi = 0.0;
  for (const auto& b : bins) {
    const double d = static_cast<double>(b.observed) - b.expected;
    chi += d * d / b.expected;
  }
  r.bins = bins;
  r.chiSquare = chi;
  r.degreesOfFreedom = static_cast<int>(bins.size()) - 1;
  r.pValue = r.degreesOfFreedom > 0 ? boost::math::gamma_q(0.5 * r.degreesOfFreedom, 0.5 * chi) : 1.0;
  return r;
}

PoissonLawReport poisson_law_test(const ExperimentConfig& config) {
  const ModelParams& m = config.params;
  if (!m.tasep()) throw std::domain_error("poisson_law_test requires TASEP (gamma = 1)");
  const double t = config.horizon;
  const auto N = static_cast<std::int64_t>(std::ceil(t));
  const double horizon = t / static_cast<double>(N);
  const Window window = config.window_for(N);
  const Profile eq = Profile::constant(m.rho);
  const DynamicsSpec dyn = DynamicsSpec::bulk(m);
  const std::uint64_t family = derive_seed(config.seed, kPoissonTag, static_cast<std::uint64_t>(N));
  struct Out {
    std::int64_t half;
    std::int64_t full;
    bool violation;
  };
  const auto outs = parallel_map<Out>(static_cast<std::size_t>(config.trajectories), [&](std::size_t i) {
    Rng rng(family, i);
    InitialSample init = sample_initial(eq, m.rho, N, window, rng);
    const Trajectory tr = simulate(init.state, dyn, horizon, rng);
    const std::int64_t half = tr.tagged_position_at(0.5 * t) - tr.initialTaggedSite;
    return Out{half, tr.displacement(), tr.boundaryViolation};
  });
  std::vector<std::int64_t> X(outs.size());
  double s = 0.0, ss = 0.0, sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
  std::int64_t violations = 0;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    X[i] = outs[i].full;
    const double x = static_cast<double>(outs[i].full);
    const double a = static_cast<double>(outs[i].half);
    const double b = x - a;
    s += x;
    ss += x * x;
    sa += a;
    sb += b;
    saa += a * a;
    sbb += b * b;
    sab += a * b;
    violations += outs[i].violation;
  }
  const double M = static_cast<double>(outs.size());
  const double lambda = (1.0 - m.rho) * t;
  PoissonLawReport r = chi_square_poisson(X, lambda);
  r.t = t;
  r.trajectories = config.trajectories;
  r.mean = s / M;
  r.variance = M > 1.0 ? (ss - M * r.mean * r.mean) / (M - 1.0) : 0.0;
  r.meanRatio = r.mean / lambda;
  r.varianceRatio = r.mean > 0.0 ? r.variance / r.mean : std::nan("");
  const double cov = sab / M - (sa / M) * (sb / M);
  const double va = saa / M - (sa / M) * (sa / M);
  const double vb = sbb / M - (sb / M) * (sb / M);
  r.incrementCorrelation = va > 0.0 && vb > 0.0 ? cov / std::sqrt(va * vb) : 0.0;
  r.incrementCorrelationStdError = 1.0 / std::sqrt(M);
  r.boundaryViolations = violations;
  return r;
}

std::vector<double> empirical_cumulant(const std::vector<std::int64_t>& X, std::int64_t N,
                                       const std::vector<double>& lambdas) {
  if (X.empty()) throw std::invalid_argument("empirical_cumulant requires samples");
  std::vector<double> out;
  out.reserve(lambdas.size());
  std::vector<double> terms(X.size());
  const double logM = std::log(static_cast<double>(X.size()));
  for (double lambda : lambdas) {
    if (lambda == 0.0) {
      out.push_back(0.0);
      continue;
    }
    for (std::size_t i = 0; i < X.size(); ++i) terms[i] = lambda * static_cast<double>(X[i]);
    out.push_back((log_sum_exp(terms) - logM) / static_cast<double>(N));
  }
  return out;
}

double legendre_on_grid(const std::vector<double>& lambdas, const std::vector<double>& values, double A,
                        double* argLambda) {
  if (lambdas.size() != values.size() || lambdas.empty()) throw std::invalid_argument("grid size mismatch");
  double best = -std::numeric_limits<double>::infinity();
  double arg = lambdas.front();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double v = lambdas[i] * A - values[i];
    if (v > best) {
      best = v;
      arg = lambdas[i];
    }
  }
  if (argLambda) *argLambda = arg;
  return best;
}

CumulantReport estimate_cumulant(const std::vector<double>& lambdaGrid, const ExperimentConfig& config) {
  if (lambdaGrid.size() < 2) throw std::invalid_argument("estimate_cumulant requires at least two lambdas");
  CumulantReport rep;
  const ModelParams& m = config.params;
  for (std::int64_t N : config.Ns) {
    const auto X = equilibrium_displacements(config, N, kCumulantTag);
    const auto values = empirical_cumulant(X, N, lambdaGrid);
    CumulantSummary sum;
    sum.N = N;
    sum.A = config.A;
    std::int64_t maxAbs = 0;
    for (auto x : X) maxAbs = std::max<std::int64_t>(maxAbs, std::abs(x));
    for (std::size_t i = 0; i < lambdaGrid.size(); ++i) {
      const double l = lambdaGrid[i];
      const double oracle = m.tasep() ? (1.0 - m.rho) * std::expm1(l) : std::nan("");
      rep.rows.push_back({N, l, values[i], oracle});
      if (!std::isfinite(values[i]) || std::abs(l) * static_cast<double>(maxAbs) > 700.0) sum.overflowGuard = true;
    }
    for (std::size_t i = 1; i + 1 < lambdaGrid.size(); ++i) {
      const double w = (lambdaGrid[i] - lambdaGrid[i - 1]) / (lambdaGrid[i + 1] - lambdaGrid[i - 1]);
      const double chord = (1.0 - w) * values[i - 1] + w * values[i + 1];
      if (values[i] > chord + 1e-12 * (1.0 + std::abs(chord))) sum.convex = false;
    }
    sum.legendre = legendre_on_grid(lambdaGrid, values, config.A, &sum.argLambda);
    rep.summaries.push_back(sum);
  }
  return rep;
}

Profile configuration_profile(const LatticeState& state) {
  const double invN = 1.0 / static_cast<double>(state.scale);
  std::vector<Knot> knots;
  const auto& ps = state.particles;
  for (std::size_t i = 0; i < ps.size();) {
    std::size_t j = i;
    while (j + 1 < ps.size() && ps[j + 1] == ps[j] + 1) ++j;
    const double a = static_cast<double>(ps[i]) * invN;
    const double b = static_cast<double>(ps[j] + 1) * invN;
    knots.push_back({a, 0.0});
    knots.push_back({a, 1.0});
    knots.push_back({b, 1.0});
    knots.push_back({b, 0.0});
    i = j + 1;
  }
  if (knots.empty()) return Profile::constant(0.0);
  return Profile(std::move(knots), 0.0, 0.0);
}

Profile truncate_profile(const Profile& profile, double a, double b) {
  if (!(b > a)) throw std::invalid_argument("truncate_profile requires a < b");
  std::vector<Knot> knots{{a, 0.0}, {a, profile(a)}};
  for (const auto& k : profile.knots()) {
    if (k.u > a + kKnotTolerance && k.u < b - kKnotTolerance) knots.push_back(k);
  }
  knots.push_back({b, profile.left_limit(b)});
  knots.push_back({b, 0.0});
  return Profile(std::move(knots), 0.0, 0.0);
}

FluxReport flux_dominance_check(const ExperimentConfig& config, std::int64_t N) {
  const ModelParams& m = config.params;
  const Window window = config.window_for(N);
  Profile sampling = Profile::constant(m.rho);
  if (config.start == StartKind::Strategy) {
    sampling = strategy_plan(config.resolved_regime(), config.A, config.eps, m).profile;
  } else if (config.start != StartKind::Equilibrium) {
    throw std::invalid_argument("flux_dominance_check supports equilibrium and strategy starts");
  }
  const double invN = 1.0 / static_cast<double>(N);
  const double a = static_cast<double>(window.lo(N)) * invN;
  const double b = static_cast<double>(window.hi(N) + 1) * invN;
  const CumulativeProfile macro(truncate_profile(sampling, a, b), a, 0.0);

  FluxReport rep;
  rep.N = N;
  rep.trajectories = config.trajectories;
  rep.start = config.start;
  rep.reference = config.fluxReference;
  rep.epsTest = config.epsTest;
  for (double t : config.fluxTimes) {
    for (double L : config.fluxL) {
      FluxPoint p;
      p.t = t;
      p.L = L;
      p.profileReference = hopf_lax_value_local(macro, m, t, L).value;
      rep.points.push_back(p);
    }
  }

  const DynamicsSpec dyn = DynamicsSpec::bulk(m);
  const std::uint64_t family = derive_seed(config.seed, kFluxTag, static_cast<std::uint64_t>(N));
  SimOptions opts;
  opts.recordTaggedPath = false;
  opts.snapshotTimes = config.fluxTimes;
  std::sort(opts.snapshotTimes.begin(), opts.snapshotTimes.end());
  struct Out {
    std::vector<std::uint8_t> flags;  // bit 0: test threshold, bit 1: sanity threshold
  };
  const double epsTest = config.epsTest;
  const bool empirical = config.fluxReference == FluxReference::Empirical;
  const auto outs = parallel_map<Out>(static_cast<std::size_t>(config.trajectories), [&](std::size_t i) {
    Rng rng(family, i);
    InitialSample init = sample_initial(sampling, m.rho, N, window, rng);
    std::optional<CumulativeProfile> quenched;
    if (empirical) quenched.emplace(configuration_profile(init.state), a, 0.0);
    const Trajectory tr = simulate(init.state, dyn, 1.0, rng, opts);
    Out o;
    o.flags.resize(rep.points.size(), 0);
    for (std::size_t k = 0; k < rep.points.size(); ++k) {
      const FluxPoint& p = rep.points[k];
      const LatticeState* snap = nullptr;
      for (const auto& [time, st] : tr.snapshots) {
        if (std::abs(time - p.t) < 1e-12) snap = &st;
      }
      if (!snap) throw std::logic_error("missing snapshot");
      const auto cut = static_cast<Site>(std::floor(p.L * static_cast<double>(N) + 1e-9));
      const double count = static_cast<double>(snap->count_up_to(cut)) * invN;
      const double v = empirical ? hopf_lax_value_local(*quenched, m, p.t, p.L).value : p.profileReference;
      if (v > count + epsTest) o.flags[k] |= 1;
      if (v > count + kFluxSanityEps) o.flags[k] |= 2;
    }
    return o;
  });
  for (const auto& o : outs) {
    bool any = false, anySanity = false;
    for (std::size_t k = 0; k < o.flags.size(); ++k) {
      if (o.flags[k] & 1) {
        ++rep.points[k].violations;
        ++rep.totalViolations;
        any = true;
      }
      if (o.flags[k] & 2) {
        ++rep.points[k].sanityViolations;
        anySanity = true;
      }
    }
    rep.trajectoriesWithViolation += any;
    rep.sanityTrajectoriesWithViolation += anySanity;
  }
  const double M = static_cast<double>(config.trajectories);
  rep.violationFrequency = static_cast<double>(rep.trajectoriesWithViolation) / M;
  rep.sanityFrequency = static_cast<double>(rep.sanityTrajectoriesWithViolation) / M;
  return rep;
}

std::vector<SlowedHoleRow> slowed_hole_check(const ExperimentConfig& config) {
  const ModelParams& m = config.params;
  if (!m.tasep()) throw std::domain_error("slowed_hole_check requires TASEP (gamma = 1)");
  std::vector<SlowedHoleRow> rows;
  for (std::int64_t N : config.Ns) {
    const Window window = config.window_for(N);
    const std::uint64_t family = derive_seed(config.seed, kSlowedHoleTag, static_cast<std::uint64_t>(N));
    SimOptions opts;
    opts.recordTaggedPath = false;
    opts.snapshotTimes = {1.0};
    struct Out {
      std::int64_t X;
      std::int64_t hole;
      bool violation;
    };
    const auto outs = parallel_map<Out>(static_cast<std::size_t>(config.trajectories), [&](std::size_t i) {
      Rng rng(family, i);
      const SlowedHoleResult r = simulate_slowed_hole(N, m.rho, config.eps, rng, window, opts);
      return Out{r.trajectory.displacement(), r.holePath.back().second - r.initialHole,
                 r.trajectory.boundaryViolation};
    });
    SlowedHoleRow row;
    row.N = N;
    row.trajectories = config.trajectories;
    std::int64_t pinned = 0;
    double hole = 0.0;
    for (const auto& o : outs) {
      pinned += o.X == 0;
      hole += static_cast<double>(o.hole);
      row.boundaryViolations += o.violation;
    }
    const double M = static_cast<double>(outs.size());
    row.fractionPinned = static_cast<double>(pinned) / M;
    row.meanHoleDisplacement = hole / M / static_cast<double>(N);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace asep
