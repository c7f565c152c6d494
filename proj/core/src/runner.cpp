#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include <json.hpp>

#include "asep/checks.hpp"
#include "asep/csv.hpp"
#include "asep/estimators.hpp"
#include "asep/hydro.hpp"
#include "asep/parallel.hpp"
#include "asep/runner.hpp"
#include "asep/simulate.hpp"
#include "asep/variational.hpp"

namespace asep {

namespace {

using json = nlohmann::ordered_json;

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

template <typename T>
json optional_number(const std::optional<T>& x) {
  return x ? number(static_cast<double>(*x)) : json(nullptr);
}

std::string fmt(double x) { return format_double(x); }
std::string fmt(std::int64_t x) { return std::to_string(x); }
std::string fmt_opt(const std::optional<double>& x) { return x ? format_double(*x) : ""; }
std::string fmt_bool(bool b) { return b ? "true" : "false"; }

double safe(double (*f)(double, const ModelParams&), double A, const ModelParams& m) {
  try {
    return f(A, m);
  } catch (const std::exception&) {
    return std::nan("");
  }
}

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json tail_json(const TailEstimate& e) {
  return json{{"N", e.N},
              {"trajectories", e.trajectories},
              {"hits", e.hits},
              {"pHat", number(e.pHat)},
              {"stdError", number(e.stdError)},
              {"ci95", {number(e.ciLo), number(e.ciHi)}},
              {"rateHat", number(e.rateHat)},
              {"effectiveSampleSize", optional_number(e.effectiveSampleSize)},
              {"rawWeightEss", optional_number(e.rawWeightEss)},
              {"qFrequency", optional_number(e.qFrequency)},
              {"eps", optional_number(e.eps)},
              {"upperBoundOnly", e.upperBoundOnly},
              {"lowHitWarning", e.lowHitWarning},
              {"degenerateWeights", e.degenerateWeights},
              {"boundaryViolations", e.boundaryViolations}};
}

json run_tail(const ExperimentConfig& c, std::ostream& csv) {
  const ModelParams& m = c.params;
  CsvWriter w(csv);
  w.row({"N", "method", "eps", "trajectories", "hits", "pHat", "stdError", "ciLo", "ciHi", "rateHat", "ess",
         "rawWeightEss", "qFrequency", "exact", "I_gamma", "J1", "J2", "upperBoundOnly", "lowHitWarning",
         "degenerateWeights", "boundaryViolations"});
  const double Ig = safe(rate_I_gamma, c.A, m);
  const double J1 = safe(lower_bound_J1, c.A, m);
  const double J2 = safe(lower_bound_J2, c.A, m);
  json results = json::array();
  const std::string method(to_string(c.method));
  for (std::int64_t N : c.Ns) {
    const double exact = m.tasep() ? exact_poisson_tail(c.A, m, N, c.side) : std::nan("");
    if (c.method == TailMethod::Exact) {
      const double logP = log_exact_poisson_tail(c.A, m.rho, N, c.side);
      w.row({fmt(N), method, "", "", "", fmt(std::exp(logP)), "", "", "", fmt(-logP / static_cast<double>(N)), "", "",
             "", fmt(exact), fmt(Ig), fmt(J1), fmt(J2), "", "", "", ""});
      results.push_back(json{{"N", N},
                             {"exact", number(std::exp(logP))},
                             {"rateHat", number(-logP / static_cast<double>(N))},
                             {"rateGap", number(std::abs(-logP / static_cast<double>(N) - Ig) / Ig)}});
      continue;
    }
    std::vector<double> epsList{c.eps};
    if (c.method == TailMethod::Importance && !c.epsSweep.empty()) epsList = c.epsSweep;
    for (double eps : epsList) {
      Clock clock;
      const TailEstimate e = c.method == TailMethod::Direct ? estimate_tail_direct(c, N)
                                                            : estimate_tail_importance(c, N, eps);
      const double secs = clock.seconds();
      w.row({fmt(N), method, c.method == TailMethod::Direct ? "" : fmt(eps), fmt(e.trajectories), fmt(e.hits),
             fmt(e.pHat), fmt(e.stdError), fmt(e.ciLo), fmt(e.ciHi), fmt(e.rateHat), fmt_opt(e.effectiveSampleSize),
             fmt_opt(e.rawWeightEss), fmt_opt(e.qFrequency), fmt(exact), fmt(Ig), fmt(J1), fmt(J2),
             fmt_bool(e.upperBoundOnly), fmt_bool(e.lowHitWarning), fmt_bool(e.degenerateWeights),
             fmt(e.boundaryViolations)});
      json r = tail_json(e);
      r["exact"] = number(exact);
      r["runtimeSeconds"] = secs;
      results.push_back(r);
    }
  }
  return json{{"side", to_string(c.side)},
              {"method", method},
              {"reference", {{"I_gamma", number(Ig)}, {"J1", number(J1)}, {"J2", number(J2)}}},
              {"estimates", results}};
}

json run_lln(const ExperimentConfig& c, std::ostream& csv) {
  Clock clock;
  const auto rows = lln_check(c);
  CsvWriter w(csv);
  w.row({"N", "start", "predicted", "mean", "q05", "q50", "q95", "tolerance", "fractionWithin", "trajectories",
         "boundaryViolations"});
  json out = json::array();
  for (const auto& r : rows) {
    w.row({fmt(r.N), std::string(to_string(c.start)), fmt(r.predicted), fmt(r.mean), fmt(r.q05), fmt(r.q50),
           fmt(r.q95), fmt(r.tolerance), fmt(r.fractionWithin), fmt(r.trajectories), fmt(r.boundaryViolations)});
    out.push_back(json{{"N", r.N},
                       {"predicted", r.predicted},
                       {"mean", r.mean},
                       {"quantiles", {{"q05", r.q05}, {"q50", r.q50}, {"q95", r.q95}}},
                       {"fractionWithin", r.fractionWithin}});
  }
  return json{{"start", to_string(c.start)}, {"rows", out}, {"runtimeSeconds", clock.seconds()}};
}

json run_poisson(const ExperimentConfig& c, std::ostream& csv) {
  Clock clock;
  const PoissonLawReport r = poisson_law_test(c);
  CsvWriter w(csv);
  w.row({"lo", "hi", "observed", "expected"});
  for (const auto& b : r.bins) {
    const std::string hi = b.hi == std::numeric_limits<std::int64_t>::max() ? "inf" : fmt(b.hi);
    w.row({fmt(b.lo), hi, fmt(b.observed), fmt(b.expected)});
  }
  return json{{"t", r.t},
              {"trajectories", r.trajectories},
              {"mean", r.mean},
              {"variance", r.variance},
              {"meanRatio", r.meanRatio},
              {"varianceRatio", number(r.varianceRatio)},
              {"chiSquare", r.chiSquare},
              {"degreesOfFreedom", r.degreesOfFreedom},
              {"pValue", r.pValue},
              {"incrementCorrelation", r.incrementCorrelation},
              {"incrementCorrelationStdError", r.incrementCorrelationStdError},
              {"boundaryViolations", r.boundaryViolations},
              {"runtimeSeconds", clock.seconds()}};
}

json run_cumulant(const ExperimentConfig& c, std::ostream& csv) {
  Clock clock;
  std::vector<double> grid;
  for (std::int64_t i = 0; i < c.lambdaCount; ++i) {
    grid.push_back(c.lambdaMin + (c.lambdaMax - c.lambdaMin) * static_cast<double>(i) /
                                     static_cast<double>(c.lambdaCount - 1));
  }
  const CumulantReport r = estimate_cumulant(grid, c);
  CsvWriter w(csv);
  w.row({"N", "lambda", "cumulant", "poissonOracle"});
  for (const auto& row : r.rows) w.row({fmt(row.N), fmt(row.lambda), fmt(row.cumulant), fmt(row.poissonOracle)});
  json sums = json::array();
  for (const auto& s : r.summaries) {
    sums.push_back(json{{"N", s.N},
                        {"A", s.A},
                        {"legendre", number(s.legendre)},
                        {"argLambda", s.argLambda},
                        {"convex", s.convex},
                        {"overflowGuard", s.overflowGuard}});
  }
  return json{{"note", "Legendre transform of the empirical cumulant is an upper-bound diagnostic only"},
              {"summaries", sums},
              {"runtimeSeconds", clock.seconds()}};
}

json run_flux(const ExperimentConfig& c, std::ostream& csv) {
  CsvWriter w(csv);
  w.row({"N", "t", "L", "profileReference", "violations", "sanityViolations"});
  json out = json::array();
  for (std::int64_t N : c.Ns) {
    Clock clock;
    const FluxReport r = flux_dominance_check(c, N);
    for (const auto& p : r.points) {
      w.row({fmt(N), fmt(p.t), fmt(p.L), fmt(p.profileReference), fmt(p.violations), fmt(p.sanityViolations)});
    }
    out.push_back(json{{"N", N},
                       {"trajectories", r.trajectories},
                       {"epsTest", r.epsTest},
                       {"reference", r.reference == FluxReference::Empirical ? "empirical" : "profile"},
                       {"trajectoriesWithViolation", r.trajectoriesWithViolation},
                       {"violationFrequency", r.violationFrequency},
                       {"sanityEps", kFluxSanityEps},
                       {"sanityFrequency", r.sanityFrequency},
                       {"runtimeSeconds", clock.seconds()}});
  }
  return json{{"start", to_string(c.start)}, {"rows", out}};
}

json run_rates(const ExperimentConfig& c, std::ostream& csv) {
  std::vector<double> As;
  for (std::int64_t i = 0; i < c.aCount; ++i) {
    As.push_back(c.aMin + (c.aMax - c.aMin) * static_cast<double>(i) / static_cast<double>(c.aCount - 1));
  }
  const auto rows = tabulate_rates(c.params, As);
  write_rates_csv(csv, rows);
  return json{{"rows", rows.size()}};
}

json run_hydro(const ExperimentConfig& c, std::ostream& csv) {
  const StrategyRegime r = c.resolved_regime();
  const ModelParams& m = c.params;
  const bool nonentropic = r == StrategyRegime::LowerNonentropic;
  const EvolutionDescriptor evo = nonentropic ? EvolutionDescriptor::nonentropic(c.A, c.eps, m)
                                              : EvolutionDescriptor::closed_form(r, c.A, c.eps, m);
  std::vector<double> grid;
  const auto n = static_cast<std::int64_t>(std::floor((c.uMax - c.uMin) / c.uStep + 1e-9));
  for (std::int64_t i = 0; i <= n; ++i) grid.push_back(c.uMin + static_cast<double>(i) * c.uStep);
  write_evolution_csv(csv, evo, c.times, grid);
  json times = json::array();
  const CumulativeProfile& v0 = evo.initial();
  for (double t : c.times) {
    const TaggedVelocity tv = tagged_velocity(evo, t);
    double gap = 0.0;
    if (!nonentropic) {
      for (double u : grid) gap = std::max(gap, std::abs(evo.cumulative(t, u) - hopf_lax_value(v0, m, t, u).value));
    }
    times.push_back(json{{"t", t},
                         {"taggedPosition", tv.position},
                         {"unique", tv.unique},
                         {"levelSet", {tv.levelLo, tv.levelHi}},
                         {"maxHopfLaxGap", nonentropic ? json(nullptr) : json(gap)}});
  }
  return json{{"regime", std::string(to_string(r))}, {"entropic", !nonentropic}, {"times", times}};
}

json run_variational(const ExperimentConfig& c, std::ostream& csv) {
  Clock clock;
  const ModelParams& m = c.params;
  const ObstacleSpec spec = problem_obstacle(c.problem, c.A, m);
  const PiecewiseFn analytic = analytic_minimizer(c.problem, c.A, m);
  RegularizedReport rep;
  const PiecewiseFn numeric = solve_lambda_regularized(spec, c.regLambda, c.regDelta, c.regEps, c.gridStep, &rep);
  CsvWriter w(csv);
  w.row({"u", "v_regularized", "v_analytic", "H"});
  const auto n = static_cast<std::int64_t>(std::ceil((spec.b - spec.a) / c.gridStep - 1e-9));
  double maxGap = 0.0;
  for (std::int64_t i = 0; i <= n; ++i) {
    const double u = std::min(spec.b, spec.a + static_cast<double>(i) * c.gridStep);
    const double vn = numeric(u);
    const double va = analytic(u);
    maxGap = std::max(maxGap, std::abs(vn - va));
    w.row({fmt(u), fmt(vn), fmt(va), fmt(spec.H(u))});
  }
  const PiecewiseFn analyticOnObstacle = c.problem == Problem::One ? general_minimizer(spec) : analytic;
  const double costNumeric = cost_K(numeric, m);
  const double costAnalytic = cost_K(analyticOnObstacle, m);
  return json{{"problem", c.problem == Problem::One ? "one" : "two"},
              {"interval", {spec.a, spec.b}},
              {"iterations", rep.iterations},
              {"residual", rep.residual},
              {"converged", rep.converged},
              {"convex", rep.convex},
              {"maxNormGap", maxGap},
              {"costRegularized", costNumeric},
              {"costAnalytic", costAnalytic},
              {"costAnalyticFull", cost_K(analytic, m)},
              {"runtimeSeconds", clock.seconds()}};
}

json run_simulate(const ExperimentConfig& c, std::ostream& csv) {
  const ModelParams& m = c.params;
  CsvWriter w(csv);
  w.row({"N", "trajectory", "displacement", "logInitialWeight", "logDynamicWeight", "events", "boundaryViolation"});
  Profile sampling = Profile::constant(m.rho);
  DynamicsSpec dyn = DynamicsSpec::bulk(m);
  if (c.start == StartKind::Strategy) {
    const StrategyPlan plan = strategy_plan(c.resolved_regime(), c.A, c.eps, m);
    sampling = plan.profile;
    if (plan.tilt) dyn = DynamicsSpec::tilted(m, *plan.tilt);
  }
  json out = json::array();
  for (std::int64_t N : c.Ns) {
    Clock clock;
    const Window window = c.window_for(N);
    const std::uint64_t family = derive_seed(c.seed, 31, static_cast<std::uint64_t>(N));
    SimOptions opts;
    opts.recordTaggedPath = false;
    struct Out {
      std::int64_t X;
      double init;
      double dyn;
      std::int64_t events;
      bool violation;
    };
    const auto outs = parallel_map<Out>(static_cast<std::size_t>(c.trajectories), [&](std::size_t i) {
      Rng rng(family, i);
      double logInit = 0.0;
      LatticeState start;
      if (c.start == StartKind::Step) {
        start = step_configuration(N, window);
      } else {
        InitialSample s = sample_initial(sampling, m.rho, N, window, rng);
        logInit = s.logWeight;
        start = std::move(s.state);
      }
      const Trajectory tr = simulate(start, dyn, 1.0, rng, opts);
      return Out{tr.displacement(), logInit, tr.logDynamicWeight, tr.events, tr.boundaryViolation};
    });
    double mean = 0.0;
    for (std::size_t i = 0; i < outs.size(); ++i) {
      const auto& o = outs[i];
      w.row({fmt(N), fmt(static_cast<std::int64_t>(i)), fmt(o.X), fmt(o.init), fmt(o.dyn), fmt(o.events),
             fmt_bool(o.violation)});
      mean += static_cast<double>(o.X);
    }
    mean /= static_cast<double>(outs.size()) * static_cast<double>(N);
    out.push_back(json{{"N", N}, {"meanVelocity", mean}, {"runtimeSeconds", clock.seconds()}});
  }
  return json{{"start", to_string(c.start)}, {"rows", out}};
}

json run_slowed_hole(const ExperimentConfig& c, std::ostream& csv) {
  Clock clock;
  const auto rows = slowed_hole_check(c);
  CsvWriter w(csv);
  w.row({"N", "trajectories", "fractionPinned", "meanHoleDisplacement", "boundaryViolations"});
  json out = json::array();
  for (const auto& r : rows) {
    w.row({fmt(r.N), fmt(r.trajectories), fmt(r.fractionPinned), fmt(r.meanHoleDisplacement),
           fmt(r.boundaryViolations)});
    out.push_back(json{{"N", r.N}, {"fractionPinned", r.fractionPinned}});
  }
  return json{{"rows", out}, {"runtimeSeconds", clock.seconds()}};
}

}  // namespace

void apply_overrides(ExperimentConfig& c, const RunOverrides& o) {
  if (o.seed) {
    c.seed = *o.seed;
    c.raw["seed"] = std::to_string(*o.seed);
  }
  if (o.outputDir) {
    c.outputDir = *o.outputDir;
    c.raw["output_dir"] = *o.outputDir;
  }
  if (o.Ns) {
    c.Ns = *o.Ns;
    std::string s;
    for (auto N : *o.Ns) s += (s.empty() ? "" : ",") + std::to_string(N);
    c.raw["N"] = s;
  }
  if (o.trajectories) {
    c.trajectories = *o.trajectories;
    c.raw["trajectories"] = std::to_string(*o.trajectories);
  }
}

RunOutput run_experiment(const ExperimentConfig& c) {
  c.validate();
  namespace fs = std::filesystem;
  fs::create_directories(c.outputDir);
  const std::string kind(to_string(c.kind));
  RunOutput out{(fs::path(c.outputDir) / (kind + ".csv")).string(), (fs::path(c.outputDir) / "summary.json").string()};
  std::ofstream csv(out.csvPath, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + out.csvPath);
  Clock clock;
  json results;
  switch (c.kind) {
    case ExperimentKind::Tail: results = run_tail(c, csv); break;
    case ExperimentKind::Lln: results = run_lln(c, csv); break;
    case ExperimentKind::PoissonLaw: results = run_poisson(c, csv); break;
    case ExperimentKind::Cumulant: results = run_cumulant(c, csv); break;
    case ExperimentKind::Flux: results = run_flux(c, csv); break;
    case ExperimentKind::TabulateRates: results = run_rates(c, csv); break;
    case ExperimentKind::Hydro: results = run_hydro(c, csv); break;
    case ExperimentKind::Variational: results = run_variational(c, csv); break;
    case ExperimentKind::Simulate: results = run_simulate(c, csv); break;
    case ExperimentKind::SlowedHole: results = run_slowed_hole(c, csv); break;
  }
  csv.close();
  json echo = json::object();
  for (const auto& [k, v] : c.raw) echo[k] = v;
  json summary{{"schemaVersion", kSummarySchemaVersion},
               {"kind", kind},
               {"seed", c.seed},
               {"workers", worker_count()},
               {"params", {{"p", c.params.p}, {"q", c.params.q}, {"gamma", c.params.gamma}, {"rho", c.params.rho}}},
               {"config", echo},
               {"csv", out.csvPath},
               {"results", results},
               {"runtimeSeconds", clock.seconds()}};
  std::ofstream js(out.jsonPath, std::ios::binary);
  if (!js) throw std::runtime_error("cannot write " + out.jsonPath);
  js << summary.dump(2) << '\n';
  return out;
}

std::string error_json(const std::string& key, const std::string& message) {
  return json{{"error", {{"key", key.empty() ? json(nullptr) : json(key)}, {"message", message}}}}.dump();
}

int run(const std::string& configPath, const RunOverrides& overrides, std::ostream& err) {
  try {
    ExperimentConfig c = load_config(configPath);
    apply_overrides(c, overrides);
    c.validate();
    run_experiment(c);
    return 0;
  } catch (const ConfigError& e) {
    err << error_json(e.key(), e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << error_json("", e.what()) << '\n';
    return 1;
  }
}

int run(const std::string& configPath) { return run(configPath, {}, std::cerr); }

}  // namespace asep
