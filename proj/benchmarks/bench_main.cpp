#include <benchmark/benchmark.h>

#include "asep/hydro.hpp"
#include "asep/lattice.hpp"
#include "asep/model.hpp"
#include "asep/simulate.hpp"
#include "asep/variational.hpp"

namespace {

void BM_SimulateEquilibrium(benchmark::State& state) {
  const auto m = asep::ModelParams::make(0.75, 0.5);
  const auto N = state.range(0);
  const auto dyn = asep::DynamicsSpec::bulk(m);
  asep::SimOptions opts;
  opts.recordTaggedPath = false;
  std::uint64_t i = 0;
  std::int64_t events = 0;
  for (auto _ : state) {
    asep::Rng rng(1, i++);
    const auto init = asep::sample_initial(asep::Profile::constant(0.5), 0.5, N, asep::Window{1.5, 1.5}, rng);
    const auto tr = asep::simulate(init.state, dyn, 1.0, rng, opts);
    events += tr.events;
    benchmark::DoNotOptimize(tr.finalTaggedSite);
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateEquilibrium)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_SimulateTilted(benchmark::State& state) {
  const auto m = asep::ModelParams::make(0.75, 0.5);
  const auto plan = asep::strategy_plan(asep::StrategyRegime::UpperFar, 0.6, 0.05, m);
  const auto dyn = asep::DynamicsSpec::tilted(m, *plan.tilt);
  const auto N = state.range(0);
  asep::SimOptions opts;
  opts.recordTaggedPath = false;
  std::uint64_t i = 0;
  for (auto _ : state) {
    asep::Rng rng(2, i++);
    const auto init = asep::sample_initial(plan.profile, 0.5, N, asep::Window{1.5, 1.5}, rng);
    const auto tr = asep::simulate(init.state, dyn, 1.0, rng, opts);
    benchmark::DoNotOptimize(tr.logDynamicWeight);
  }
}
BENCHMARK(BM_SimulateTilted)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_HopfLaxValue(benchmark::State& state) {
  const auto m = asep::ModelParams::make(0.75, 0.5);
  const asep::CumulativeProfile v0(asep::build_strategy_profile(asep::StrategyRegime::UpperFar, 0.6, 0.05, m));
  double u = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(asep::hopf_lax_value(v0, m, 0.5, u).value);
    u = u > 2.0 ? -1.0 : u + 1e-3;
  }
}
BENCHMARK(BM_HopfLaxValue);

void BM_RegularizedSolver(benchmark::State& state) {
  const auto m = asep::ModelParams::make(0.75, 0.5);
  const auto spec = asep::problem_obstacle(asep::Problem::Two, 0.3, m);
  const double h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(asep::solve_lambda_regularized(spec, 1e4, 1e-3, 1e-3, h)(0.5));
  }
}
BENCHMARK(BM_RegularizedSolver)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
