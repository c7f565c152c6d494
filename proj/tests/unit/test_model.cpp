#include <doctest.h>

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "asep/model.hpp"

using asep::ModelParams;
using asep::StrategyRegime;

namespace {

double bernoulli_entropy(double th, double rho) {
  double v = 0.0;
  if (th > 0.0) v += th * std::log(th / rho);
  if (th < 1.0) v += (1.0 - th) * std::log((1.0 - th) / (1.0 - rho));
  return v;
}

double K_by_quadrature(const asep::Profile& prof, double rho, double lo, double hi) {
  std::vector<double> cuts{lo};
  for (const auto& k : prof.knots()) {
    if (k.u > lo && k.u < hi) cuts.push_back(k.u);
  }
  cuts.push_back(hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a < 1e-15) continue;
    // Sample strictly inside the piece so jumps at the ends do not leak in.
    auto f = [&](double u) { return bernoulli_entropy(prof(u), rho); };
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13);
  }
  return total;
}

double IZ_by_optimization(double A, const ModelParams& m) {
  auto negObj = [&](double logc) {
    const double c = std::exp(logc);
    return -(A * logc - m.p * c - m.q / c + 1.0);
  };
  const auto r = boost::math::tools::brent_find_minima(negObj, -20.0, 20.0, 52);
  return -r.second;
}

}  // namespace

TEST_CASE("model params derive q and gamma") {
  const auto m = ModelParams::make(0.75, 0.3);
  CHECK(m.q == doctest::Approx(0.25));
  CHECK(m.gamma == doctest::Approx(0.5));
  CHECK(m.lln_velocity() == doctest::Approx(0.35));
  CHECK_FALSE(m.tasep());
  CHECK(ModelParams::make(1.0, 0.5).tasep());
  CHECK_THROWS(ModelParams::make(0.5, 0.5));
  CHECK_THROWS(ModelParams::make(0.75, 0.0));
  CHECK_THROWS(ModelParams::make(0.75, 1.0));
}

TEST_CASE("tilt constant satisfies the drift identity") {
  for (double p : {0.6, 0.75, 0.9}) {
    const auto m = ModelParams::make(p, 0.5);
    for (double A = -1.5; A <= 2.0; A += 0.125) {
      const auto t = asep::tilt_constant(A, m);
      CHECK(t.pPrime - t.qPrime == doctest::Approx(A).epsilon(1e-12));
      CHECK(t.c > 0.0);
    }
    CHECK(asep::tilt_constant(0.0, m).c == doctest::Approx(std::sqrt(m.q / m.p)).epsilon(1e-14));
  }
  CHECK_THROWS(asep::tilt_constant(-0.1, ModelParams::make(1.0, 0.5)));
}

TEST_CASE("rate_IZ matches direct optimisation over c") {
  for (double p : {0.6, 0.75, 1.0}) {
    const auto m = ModelParams::make(p, 0.4);
    for (double A = (m.tasep() ? 0.05 : -1.0); A <= 2.0; A += 0.15) {
      CHECK(asep::rate_IZ(A, m) == doctest::Approx(IZ_by_optimization(A, m)).epsilon(1e-9));
    }
  }
  CHECK(std::isinf(asep::rate_IZ(-0.1, ModelParams::make(1.0, 0.5))));
}

TEST_CASE("I_gamma branches join continuously at gamma") {
  for (double p : {0.6, 0.75, 0.9, 1.0}) {
    for (double rho : {0.2, 0.5, 0.8}) {
      const auto m = ModelParams::make(p, rho);
      CHECK(asep::rate_I_gamma_near(m.gamma, m) == doctest::Approx(asep::rate_I_gamma_far(m.gamma, m)).epsilon(1e-12));
      CHECK(asep::rate_I_gamma(m.gamma * (1.0 - 1e-9), m) ==
            doctest::Approx(asep::rate_I_gamma(m.gamma, m)).epsilon(1e-7));
    }
  }
  const auto m = ModelParams::make(0.75, 0.5);
  CHECK_THROWS(asep::rate_I_gamma(m.lln_velocity(), m));
  CHECK(asep::rate_I_gamma(0.6, m) > asep::rate_I_gamma(0.4, m));
}

TEST_CASE("relative entropy of strategy profiles matches quadrature") {
  const struct {
    double p, rho, A;
    StrategyRegime r;
  } cases[] = {
      {0.75, 0.5, 0.6, StrategyRegime::UpperFar},  {0.9, 0.3, 0.9, StrategyRegime::UpperFar},
      {0.75, 0.5, 0.4, StrategyRegime::UpperNear}, {1.0, 0.4, 0.8, StrategyRegime::UpperNear},
      {0.75, 0.5, 0.1, StrategyRegime::LowerMid},  {0.75, 0.5, -0.3, StrategyRegime::LowerNeg},
      {1.0, 0.5, 0.25, StrategyRegime::LowerNonentropic},
  };
  for (const auto& c : cases) {
    const auto m = ModelParams::make(c.p, c.rho);
    for (double eps : {0.0, 0.05}) {
      const auto prof = asep::build_strategy_profile(c.r, c.A, eps, m);
      const auto [lo, hi] = asep::strategy_support(prof);
      CHECK(asep::relative_entropy_K(prof, m, lo, hi) ==
            doctest::Approx(K_by_quadrature(prof, c.rho, lo, hi)).epsilon(1e-9));
    }
  }
}

TEST_CASE("flux G is the concave conjugate of L") {
  for (double p : {0.6, 0.8, 1.0}) {
    const auto m = ModelParams::make(p, 0.5);
    for (double z = -2.0; z <= 2.0; z += 0.0625) {
      double best = -1e300;
      for (int i = 0; i <= 4000; ++i) {
        const double r = i / 4000.0;
        best = std::max(best, z * r - asep::flux_L(r, m));
      }
      CHECK(asep::flux_G(z, m) == doctest::Approx(best).epsilon(1e-6));
    }
  }
  CHECK(std::isinf(asep::flux_L(1.5, ModelParams::make(0.75, 0.5))));
}

TEST_CASE("Jensen-Varadhan step cost") {
  CHECK(asep::jv_step_cost(0.5, 0.5) == doctest::Approx(0.0));
  CHECK(asep::jv_step_cost(1.0, 0.0) == doctest::Approx(1.0));
  for (double L = 0.1; L <= 1.0; L += 0.1) {
    for (double R = 0.0; R < L; R += 0.1) CHECK(asep::jv_step_cost(L, R) >= -1e-15);
  }
  CHECK_THROWS(asep::jv_step_cost(0.2, 0.5));
}

TEST_CASE("regime classification and admissibility") {
  const auto m = ModelParams::make(0.75, 0.5);
  CHECK(asep::classify_regime(0.6, m) == StrategyRegime::UpperFar);
  CHECK(asep::classify_regime(0.4, m) == StrategyRegime::UpperNear);
  CHECK(asep::classify_regime(0.1, m) == StrategyRegime::LowerMid);
  CHECK(asep::classify_regime(-0.2, m) == StrategyRegime::LowerNeg);
  CHECK(asep::classify_regime(0.25, ModelParams::make(1.0, 0.5)) == StrategyRegime::LowerNonentropic);
  CHECK_FALSE(asep::regime_admits(StrategyRegime::UpperFar, 0.4, m));
  for (auto r : {StrategyRegime::UpperFar, StrategyRegime::UpperNear, StrategyRegime::LowerNonentropic,
                 StrategyRegime::LowerMid, StrategyRegime::LowerNeg}) {
    CHECK(asep::regime_from_string(asep::to_string(r)) == r);
  }
  CHECK_THROWS(asep::regime_from_string("Sideways"));
}

TEST_CASE("strategy plans carry the tagged tilt where prescribed") {
  const auto m = ModelParams::make(0.75, 0.5);
  const auto far = asep::strategy_plan(StrategyRegime::UpperFar, 0.6, 0.05, m);
  REQUIRE(far.tilt);
  CHECK(far.tilt->pPrime - far.tilt->qPrime == doctest::Approx(0.625));
  CHECK_FALSE(asep::strategy_plan(StrategyRegime::UpperNear, 0.4, 0.05, m).tilt);
}

TEST_CASE("rate table rows and csv") {
  const auto m = ModelParams::make(0.75, 0.5);
  const auto rows = asep::tabulate_rates(m, {-0.5, 0.1, 0.4, 0.6});
  REQUIRE(rows.size() == 4);
  CHECK(rows[3].Igamma == doctest::Approx(asep::rate_I_gamma(0.6, m)));
  std::ostringstream os;
  asep::write_rates_csv(os, rows);
  CHECK(os.str().rfind("A,I_gamma,I_Z,K,J1,J2\r\n", 0) == 0);
}
