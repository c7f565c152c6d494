#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "asep/profile.hpp"
#include "asep/rng.hpp"

namespace asep {

using Site = std::int64_t;

// Occupied sites are kept as a sorted position list; nearest-neighbour particles never pass.
struct LatticeState {
  Site windowLo = 0;
  Site windowHi = 0;
  std::vector<Site> particles;
  std::size_t tagged = 0;
  std::int64_t scale = 1;

  Site tagged_site() const { return particles.at(tagged); }
  bool occupied(Site x) const;
  std::vector<std::uint8_t> occupancy() const;
  // Particles at sites <= x.
  std::size_t count_up_to(Site x) const;
  void validate() const;

  static LatticeState from_occupancy(Site windowLo, const std::vector<std::uint8_t>& occ, Site taggedSite,
                                     std::int64_t scale);
};

bool operator==(const LatticeState& a, const LatticeState& b);

// Macroscopic radii of the simulation window [-left*N, right*N].
struct Window {
  double left = 3.0;
  double right = 3.0;

  static Window symmetric(double r) { return {r, r}; }
  Site lo(std::int64_t N) const;
  Site hi(std::int64_t N) const;
};

struct InitialSample {
  LatticeState state;
  double logWeight;
};

// Product Bernoulli(rho0(x/N)) sample with the tagged particle at 0; logWeight = ln d(nu_rho0)/d(nu_rho).
InitialSample sample_initial(const Profile& profile, double rho, std::int64_t N, Window window, Rng& rng);
InitialSample sample_initial(const Profile& profile, double rho, std::int64_t N, Window window,
                             std::uint64_t seed);

// All sites of [-left*N, 0] occupied; the tagged particle is the rightmost one.
LatticeState step_configuration(std::int64_t N, Window window);

struct ZeroRangeView {
  std::vector<std::int64_t> ahead;   // gap i between particle i and i-1 ahead of the tagged one
  std::vector<std::int64_t> behind;  // gap i between particle -i and -(i-1) behind it
  Site windowLo = 0;
  Site windowHi = 0;
  std::int64_t scale = 1;
};

ZeroRangeView to_zero_range(const LatticeState& state);
LatticeState from_zero_range(const ZeroRangeView& view, Site taggedSite);
LatticeState from_zero_range(const std::vector<std::int64_t>& gaps, Site taggedSite);

struct EmpiricalMeasure {
  std::vector<double> atoms;
  double mass = 0.0;  // per atom, 1/N

  double total_mass() const { return mass * static_cast<double>(atoms.size()); }
};

EmpiricalMeasure empirical_measure(const LatticeState& state);

// Triangular bumps f_j of unit height: level l has half-width (R+1)/2^l and centres on the grid
// -(R+1) + k(R+1)/2^l, k = 0..2^(l+1); enumerated level by level, first 64 kept.
class BumpFamily {
 public:
  explicit BumpFamily(double R, std::size_t terms = 64);
  std::size_t size() const { return centres_.size(); }
  double eval(std::size_t j, double u) const;
  std::vector<double> expectations(const EmpiricalMeasure& mu) const;
  std::vector<double> expectations(const Profile& density) const;
  double distance(const std::vector<double>& a, const std::vector<double>& b) const;

 private:
  std::vector<double> centres_;
  std::vector<double> halfWidths_;
};

double measure_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double R);
double measure_distance(const EmpiricalMeasure& mu, const Profile& density, double R);

std::string run_length_encode(const LatticeState& state);

}  // namespace asep
