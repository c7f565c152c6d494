#pragma once

#include <memory>
#include <ostream>
#include <vector>

#include "asep/model.hpp"
#include "asep/profile.hpp"

namespace asep {

// v(u) = baseValue + integral of the density from base to u; piecewise quadratic.
class CumulativeProfile {
 public:
  CumulativeProfile(Profile density, double base = 0.0, double baseValue = 0.0);

  double operator()(double u) const;
  double slope(double u) const { return density_(u); }
  const Profile& density() const { return density_; }
  double base() const { return base_; }

  struct Segment {
    double x0;
    double x1;  // may be +inf for the right tail
    double v0;  // value at x0
    double d0;  // density at x0
    double k;   // density slope
  };
  // Segments covering [lo, hi], the outermost extended by the tails.
  std::vector<Segment> segments(double lo, double hi) const;
  double first_knot() const { return knots_.empty() ? base_ : knots_.front(); }
  double last_knot() const { return knots_.empty() ? base_ : knots_.back(); }

 private:
  Profile density_;
  double base_;
  std::vector<double> knots_;
  std::vector<double> values_;  // v at each knot
};

struct HopfLaxResult {
  double value;
  double argmax;
};

HopfLaxResult hopf_lax_value(const CumulativeProfile& v0, const ModelParams& params, double t, double u);
// Same value, searching only [u - gamma t, u + gamma t]; the argmax may differ on ties.
HopfLaxResult hopf_lax_value_local(const CumulativeProfile& v0, const ModelParams& params, double t, double u);

inline constexpr double kDensitySpacing = 1.0 / 512.0;

Profile entropic_density(const CumulativeProfile& v0, const ModelParams& params, double t,
                         const std::vector<double>& grid, double h = kDensitySpacing);

// Entropic solutions for the strategy profiles, 0 < t <= 1.
Profile closed_form_evolution(StrategyRegime r, double A, double eps, const ModelParams& params, double t);

// Step L | R at x0 translated with the Rankine-Hugoniot speed gamma(1-L-R).
Profile nonentropic_step_evolution(double L, double R, double t, const ModelParams& params, double x0 = 0.0);

// Nonentropic TASEP strategy: the block of density 1-A_eps on [0, rho) translated at speed A_eps - rho.
Profile nonentropic_block_evolution(double A, double eps, const ModelParams& params, double t);

class EvolutionDescriptor {
 public:
  enum class Kind { ClosedForm, HopfLaxGrid, NonentropicStep };

  static EvolutionDescriptor closed_form(StrategyRegime r, double A, double eps, const ModelParams& params);
  static EvolutionDescriptor hopf_lax(const CumulativeProfile& v0, const ModelParams& params,
                                      double h = kDensitySpacing);
  static EvolutionDescriptor nonentropic(double A, double eps, const ModelParams& params);

  Kind kind() const { return kind_; }
  const ModelParams& params() const { return params_; }
  const CumulativeProfile& initial() const { return *v0_; }

  double density(double t, double u) const;
  // Normalised like the Hopf-Lax value: v(t, u) - v(0, u) is minus the net flux through u.
  double cumulative(double t, double u) const;
  Profile profile_at(double t) const;

 private:
  EvolutionDescriptor(Kind k, const ModelParams& p) : kind_(k), params_(p) {}

  Kind kind_;
  ModelParams params_;
  StrategyRegime regime_ = StrategyRegime::UpperFar;
  double A_ = 0.0;
  double eps_ = 0.0;
  double h_ = kDensitySpacing;
  std::shared_ptr<const CumulativeProfile> v0_;
};

struct TaggedVelocity {
  double position;
  bool unique;
  double levelLo;  // extent of the level set
  double levelHi;
};

// Solves v(t, x) = v(0, 0) for x by monotone bisection.
TaggedVelocity tagged_velocity(const EvolutionDescriptor& evolution, double t);
TaggedVelocity tagged_velocity(const Profile& rho0, const ModelParams& params, double t);

void write_evolution_csv(std::ostream& os, const EvolutionDescriptor& evolution, const std::vector<double>& times,
                         const std::vector<double>& grid);

}  // namespace asep
