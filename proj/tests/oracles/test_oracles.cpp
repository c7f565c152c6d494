#include <doctest.h>

#include <cmath>

#include "asep/estimators.hpp"
#include "asep/model.hpp"

// Reference values computed independently at 30 significant digits.

using asep::ModelParams;

TEST_CASE("oracle: Poisson rate I_1(0.75) at rho = 0.5") {
  CHECK(asep::rate_poisson(0.75, 0.5, 1.0) == doctest::Approx(0.0540988310811).epsilon(1e-11));
  CHECK(asep::rate_I_gamma(0.75, ModelParams::make(1.0, 0.5)) == doctest::Approx(0.0540988310811).epsilon(1e-11));
}

TEST_CASE("oracle: I_gamma at the branch point gamma = 0.5, rho = 0.5") {
  const auto m = ModelParams::make(0.75, 0.5);
  CHECK(asep::rate_I_gamma_near(0.5, m) == doctest::Approx(0.0965735902800).epsilon(1e-11));
  CHECK(asep::rate_I_gamma_far(0.5, m) == doctest::Approx(0.0965735902800).epsilon(1e-11));
  CHECK(asep::rate_I_gamma(0.6, m) == doctest::Approx(0.170804142291).epsilon(1e-11));
}

TEST_CASE("oracle: zero-range rate and tilt") {
  const auto m = ModelParams::make(0.75, 0.5);
  CHECK(asep::rate_IZ(0.0, m) == doctest::Approx(0.133974596216).epsilon(1e-11));
  CHECK(asep::tilt_constant(1.0, m).c == doctest::Approx(1.548583770355).epsilon(1e-11));
}

TEST_CASE("oracle: Jensen-Varadhan cost and lower bounds") {
  CHECK(asep::jv_step_cost(0.75, 0.5) == doctest::Approx(0.0113071868894).epsilon(1e-11));
  const auto m = ModelParams::make(0.75, 0.5);
  CHECK(asep::lower_bound_J1(0.1, m) == doctest::Approx(0.0963723785109).epsilon(1e-11));
  CHECK(asep::lower_bound_J2(-1e-12, m) == doctest::Approx(0.480548186496).epsilon(1e-10));
  CHECK(asep::lower_bound_J2(-0.5, m) == doctest::Approx(1.242453324894).epsilon(1e-11));
}

TEST_CASE("oracle: exact TASEP tail and rates over N") {
  CHECK(asep::exact_poisson_tail(0.75, 0.5, 64, asep::TailSide::Upper) ==
        doctest::Approx(0.00491375313091).epsilon(1e-10));
  const struct {
    std::int64_t N;
    double rate;
  } rows[] = {{64, 0.08305808}, {256, 0.06377949}, {1024, 0.05717497}, {4096, 0.05503568}};
  for (const auto& r : rows) {
    const double rate = -asep::log_exact_poisson_tail(0.75, 0.5, r.N, asep::TailSide::Upper) / r.N;
    CHECK(rate == doctest::Approx(r.rate).epsilon(1e-7));
  }
}

TEST_CASE("oracle: relative entropy of the entropic strategy profiles") {
  const auto m = ModelParams::make(0.75, 0.5);
  const auto far = asep::build_strategy_profile(asep::StrategyRegime::UpperFar, 0.6, 0.0, m);
  auto [lo, hi] = asep::strategy_support(far);
  CHECK(asep::relative_entropy_K(far, m, lo, hi) == doctest::Approx(0.165888308336).epsilon(1e-11));
  const auto near = asep::build_strategy_profile(asep::StrategyRegime::UpperNear, 0.4, 0.0, m);
  std::tie(lo, hi) = asep::strategy_support(near);
  CHECK(asep::relative_entropy_K(near, m, lo, hi) == doctest::Approx(0.0380014516983).epsilon(1e-11));
}
