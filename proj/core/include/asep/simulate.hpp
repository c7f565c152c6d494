#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "asep/lattice.hpp"
#include "asep/model.hpp"
#include "asep/rng.hpp"

namespace asep {

struct RateOverride {
  Site site;  // initial position of the particle the override applies to
  double rightRate;
  double leftRate;
  double expiryTime = kNever;  // microscopic time
  bool expireOnJump = false;

  static constexpr double kNever = 1e300;
};

struct DynamicsSpec {
  double p = 1.0;
  double q = 0.0;
  double pTagged = 1.0;
  double qTagged = 0.0;
  std::vector<RateOverride> overrides;

  static DynamicsSpec bulk(const ModelParams& m);
  static DynamicsSpec tilted(const ModelParams& m, const TiltedRates& t);
  void validate() const;
};

struct SimOptions {
  std::vector<double> snapshotTimes;  // macroscopic times
  std::vector<Site> trackedSites;     // bonds (x, x+1) whose current is recorded
  bool recordTaggedPath = true;
};

struct TaggedJump {
  double time;  // microscopic
  Site position;
};

struct CurrentRecord {
  Site site;
  std::int64_t total = 0;
  std::vector<std::pair<double, int>> crossings;  // (microscopic time, +1 or -1)
};

struct Trajectory {
  double horizon = 0.0;  // macroscopic
  std::int64_t scale = 1;
  double elapsed = 0.0;  // microscopic time actually simulated
  Site initialTaggedSite = 0;
  Site finalTaggedSite = 0;
  std::int64_t taggedRightJumps = 0;
  std::int64_t taggedLeftJumps = 0;
  std::vector<TaggedJump> taggedPath;
  std::vector<CurrentRecord> currents;
  double occupancyRight = 0.0;  // integral of 1 - eta(X+1)
  double occupancyLeft = 0.0;   // integral of 1 - eta(X-1)
  std::vector<std::pair<double, LatticeState>> snapshots;
  LatticeState finalState;
  double logInitialWeight = 0.0;  // ln d(nu_rho0)/d(nu_rho)
  double logDynamicWeight = 0.0;  // ln dQ/dP of the path
  std::int64_t events = 0;
  bool boundaryViolation = false;

  std::int64_t displacement() const { return finalTaggedSite - initialTaggedSite; }
  double log_likelihood_ratio() const { return -logInitialWeight - logDynamicWeight; }
  Site tagged_position_at(double microTime) const;
};

Trajectory simulate(const LatticeState& state, const DynamicsSpec& spec, double horizon, Rng& rng,
                    const SimOptions& options = {});
Trajectory simulate(const LatticeState& state, const DynamicsSpec& spec, double horizon, std::uint64_t seed,
                    const SimOptions& options = {});

// J_t(x) at microscopic time t.
std::int64_t current(const Trajectory& traj, Site x, double t);

// Slowed-hole TASEP: blocking profile (density 1 on [0, rho), rho elsewhere); the first hole ahead of the
// block moves left at rate rho - eps. Tilt bookkeeping lands in logDynamicWeight.
struct SlowedHoleResult {
  Trajectory trajectory;
  Site initialHole = 0;
  std::vector<std::pair<double, Site>> holePath;  // microscopic time, position
};

SlowedHoleResult simulate_slowed_hole(std::int64_t N, double rho, double eps, Rng& rng, Window window,
                                      const SimOptions& options = {});
SlowedHoleResult simulate_slowed_hole(std::int64_t N, double rho, double eps, std::uint64_t seed);

}  // namespace asep
