#include <doctest.h>

#include <cmath>

#include "asep/hydro.hpp"
#include "asep/model.hpp"
#include "asep/rng.hpp"

using asep::CumulativeProfile;
using asep::ModelParams;
using asep::Profile;
using asep::StrategyRegime;

TEST_CASE("cumulative profile integrates the density from the base") {
  const Profile p({{0.0, 0.2}, {1.0, 0.8}, {1.0, 0.1}}, 0.2, 0.1);
  const CumulativeProfile v(p, 0.5, 3.0);
  CHECK(v(0.5) == doctest::Approx(3.0));
  CHECK(v(1.0) == doctest::Approx(3.0 + p.integral(0.5, 1.0)));
  CHECK(v(-2.0) == doctest::Approx(3.0 - p.integral(-2.0, 0.5)));
  CHECK(v(4.0) == doctest::Approx(3.0 + p.integral(0.5, 4.0)));
}

TEST_CASE("Hopf-Lax preserves constant profiles up to the flux") {
  const auto m = ModelParams::make(0.8, 0.3);
  const CumulativeProfile v(Profile::constant(0.3));
  for (double t : {0.1, 0.5, 1.0}) {
    for (double u : {-1.0, 0.0, 0.7}) {
      CHECK(asep::hopf_lax_value(v, m, t, u).value == doctest::Approx(0.3 * u - m.gamma * 0.21 * t).epsilon(1e-12));
    }
  }
}

TEST_CASE("local Hopf-Lax search returns the global value") {
  const auto m = ModelParams::make(0.75, 0.5);
  const CumulativeProfile v(asep::build_strategy_profile(StrategyRegime::UpperFar, 0.6, 0.05, m));
  asep::Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const double t = 0.01 + rng.uniform();
    const double u = -2.0 + 4.0 * rng.uniform();
    const auto g = asep::hopf_lax_value(v, m, t, u);
    const auto l = asep::hopf_lax_value_local(v, m, t, u);
    CHECK(l.value == doctest::Approx(g.value).epsilon(1e-13));
    CHECK(l.argmax >= u - m.gamma * t - 1e-12);
    CHECK(l.argmax <= u + m.gamma * t + 1e-12);
  }
}

TEST_CASE("Riemann problems: shock speed and rarefaction fan") {
  const auto m = ModelParams::make(1.0, 0.5);
  const double L = 0.2, R = 0.7;
  const CumulativeProfile shock(Profile({{0.0, L}, {0.0, R}}, L, R));
  const double s = m.gamma * (1.0 - L - R);
  const double t = 0.8;
  const double eps = 0.02;
  CHECK(asep::EvolutionDescriptor::hopf_lax(shock, m).density(t, s * t - eps) == doctest::Approx(L).epsilon(1e-6));
  CHECK(asep::EvolutionDescriptor::hopf_lax(shock, m).density(t, s * t + eps) == doctest::Approx(R).epsilon(1e-6));

  const CumulativeProfile fan(Profile({{0.0, 0.9}, {0.0, 0.1}}, 0.9, 0.1));
  const auto evo = asep::EvolutionDescriptor::hopf_lax(fan, m);
  for (double u = -0.6; u <= 0.6; u += 0.2) {
    const double expect = std::clamp(0.5 * (1.0 - u / (m.gamma * t)), 0.1, 0.9);
    CHECK(evo.density(t, u) == doctest::Approx(expect).epsilon(1e-3));
  }
}

TEST_CASE("nonentropic step travels at the Rankine-Hugoniot speed") {
  const auto m = ModelParams::make(1.0, 0.5);
  const Profile p = asep::nonentropic_step_evolution(0.8, 0.1, 0.5, m, 0.2);
  const double x = 0.2 + 0.5 * (1.0 - 0.8 - 0.1);
  CHECK(p(x - 1e-9) == doctest::Approx(0.8));
  CHECK(p(x + 1e-9) == doctest::Approx(0.1));
  CHECK_THROWS(asep::nonentropic_step_evolution(0.1, 0.8, 0.5, m));
}

TEST_CASE("closed-form evolutions conserve mass through the flux") {
  const auto m = ModelParams::make(0.75, 0.5);
  for (auto [r, A] : {std::pair{StrategyRegime::UpperFar, 0.6}, std::pair{StrategyRegime::UpperNear, 0.4},
                      std::pair{StrategyRegime::LowerMid, 0.1}, std::pair{StrategyRegime::LowerNeg, -0.3}}) {
    const Profile p0 = asep::build_strategy_profile(r, A, 0.05, m);
    for (double t : {0.3, 1.0}) {
      const Profile pt = asep::closed_form_evolution(r, A, 0.05, m, t);
      CHECK(pt.integral(-5.0, 5.0) == doctest::Approx(p0.integral(-5.0, 5.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("tagged velocity follows the characteristic in equilibrium") {
  const auto m = ModelParams::make(0.75, 0.4);
  const auto tv = asep::tagged_velocity(Profile::constant(0.4), m, 1.0);
  CHECK(tv.unique);
  CHECK(tv.position == doctest::Approx(m.lln_velocity()).epsilon(1e-9));
  for (auto [r, A] : {std::pair{StrategyRegime::UpperFar, 0.6}, std::pair{StrategyRegime::UpperNear, 0.4}}) {
    const auto evo = asep::EvolutionDescriptor::closed_form(r, A, 0.0, m);
    const auto at = asep::tagged_velocity(evo, 1.0);
    CHECK(at.levelLo <= A + 1e-9);
    CHECK(at.levelHi >= A - 1e-9);
  }
}
