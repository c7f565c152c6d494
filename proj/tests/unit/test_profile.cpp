#include <doctest.h>

#include <cmath>

#include "asep/model.hpp"
#include "asep/numeric.hpp"
#include "asep/profile.hpp"

using asep::Knot;
using asep::Profile;

TEST_CASE("profile evaluation is right-continuous at jumps") {
  const Profile p({{0.0, 0.2}, {0.0, 0.8}, {1.0, 0.4}}, 0.2, 0.4);
  CHECK(p(-1.0) == doctest::Approx(0.2));
  CHECK(p(0.0) == doctest::Approx(0.8));
  CHECK(p.left_limit(0.0) == doctest::Approx(0.2));
  CHECK(p(0.5) == doctest::Approx(0.6));
  CHECK(p(2.0) == doctest::Approx(0.4));
  CHECK(p.integral(-1.0, 1.0) == doctest::Approx(0.2 + 0.6));
  CHECK(p.integral(0.25, 0.75) == doctest::Approx(0.3));
}

TEST_CASE("profile rejects unsorted knots and densities outside [0, 1]") {
  CHECK_THROWS(Profile({{1.0, 0.2}, {0.0, 0.3}}, 0.2, 0.3));
  CHECK_THROWS(Profile({{0.0, 1.2}}, 0.2, 0.3));
}

TEST_CASE("pieces tile the requested interval") {
  const Profile p({{0.0, 0.0}, {0.5, 0.5}, {0.5, 1.0}, {1.0, 1.0}}, 0.0, 0.3);
  const auto pcs = p.pieces(-1.0, 2.0);
  REQUIRE_FALSE(pcs.empty());
  CHECK(pcs.front().x0 == doctest::Approx(-1.0));
  CHECK(pcs.back().x1 == doctest::Approx(2.0));
  for (std::size_t i = 1; i < pcs.size(); ++i) CHECK(pcs[i].x0 == doctest::Approx(pcs[i - 1].x1));
}

TEST_CASE("floored profile is the pointwise max") {
  const Profile p({{0.0, 0.0}, {1.0, 0.6}, {2.0, 0.0}}, 0.0, 0.0);
  const Profile f = asep::floored(p, 0.15);
  for (double u = -1.0; u <= 3.0; u += 0.01) CHECK(f(u) == doctest::Approx(std::max(p(u), 0.15)).epsilon(1e-12));
  CHECK_THROWS(asep::floored(p, 1.5));
}

TEST_CASE("entropy of a linear piece matches Simpson quadrature") {
  for (double rho : {0.3, 0.5}) {
    for (auto [d0, d1] : {std::pair{0.0, 0.5}, std::pair{0.2, 0.9}, std::pair{1.0, 0.0}, std::pair{0.4, 0.4}}) {
      const double len = 0.7;
      auto f = [&](double s) { return asep::entropy_density(d0 + (d1 - d0) * s / len, rho); };
      const double ref = asep::adaptive_simpson(f, 0.0, len, 1e-13);
      CHECK(asep::entropy_of_linear_piece(d0, d1, len, rho) == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("log_sum_exp is stable") {
  CHECK(asep::log_sum_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(asep::log_sum_exp(ninf, 3.0) == doctest::Approx(3.0));
  const std::vector<double> xs{-1.0, 0.0, 2.0};
  CHECK(asep::log_sum_exp(xs) == doctest::Approx(std::log(std::exp(-1.0) + 1.0 + std::exp(2.0))));
}

TEST_CASE("strategy profiles: tails at rho and the documented vacuum") {
  const auto m = asep::ModelParams::make(0.75, 0.5);
  const Profile far = asep::build_strategy_profile(asep::StrategyRegime::UpperFar, 0.6, 0.05, m);
  CHECK(far.left_tail() == doctest::Approx(0.5));
  CHECK(far.right_tail() == doctest::Approx(0.5));
  CHECK(far(0.0) == doctest::Approx(0.0));
  CHECK(far(0.6 - 0.5 + 0.05 - 1e-9) == doctest::Approx(0.0));
  const Profile neg = asep::build_strategy_profile(asep::StrategyRegime::LowerNeg, -0.3, 0.05, m);
  CHECK(neg(-0.01) == doctest::Approx(0.0));
  CHECK(neg(0.0) == doctest::Approx(0.5));
  CHECK_THROWS(asep::build_strategy_profile(asep::StrategyRegime::UpperFar, 0.3, 0.05, m));
}
