#include <stdexcept>

#include "asep/simulate.hpp"

namespace asep {

SlowedHoleResult simulate_slowed_hole(std::int64_t N, double rho, double eps, Rng& rng, Window window,
                                      const SimOptions& options) {
  if (!(eps > 0.0 && eps <= rho)) throw std::invalid_argument("slowed hole requires 0 < eps <= rho");
  const ModelParams m = ModelParams::make(1.0, rho);
  const Profile prof = build_strategy_profile(StrategyRegime::LowerNonentropic, 0.0, 0.0, m);
  InitialSample init = sample_initial(prof, rho, N, window, rng);
  const LatticeState& s = init.state;

  SlowedHoleResult out;
  Site h = s.tagged_site() + 1;
  for (std::size_t i = s.tagged + 1; i < s.particles.size() && s.particles[i] == h; ++i) ++h;
  out.initialHole = h;

  DynamicsSpec spec = DynamicsSpec::bulk(m);
  for (Site x = s.tagged_site(); x < h; ++x) {
    spec.overrides.push_back({x, rho - eps, 0.0, RateOverride::kNever, true});
  }
  out.trajectory = simulate(s, spec, 1.0, rng, options);
  out.trajectory.logInitialWeight = init.logWeight;

  out.holePath.push_back({0.0, h});
  for (const auto& [time, snap] : out.trajectory.snapshots) {
    Site y = snap.tagged_site() + 1;
    for (std::size_t i = snap.tagged + 1; i < snap.particles.size() && snap.particles[i] == y; ++i) ++y;
    out.holePath.push_back({time * static_cast<double>(N), y});
  }
  return out;
}

SlowedHoleResult simulate_slowed_hole(std::int64_t N, double rho, double eps, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_slowed_hole(N, rho, eps, rng, Window{0.0, rho + 1.0});
}

}  // namespace asep
