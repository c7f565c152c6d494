#include <doctest.h>

#include <cmath>
#include <sstream>

#include "asep/model.hpp"
#include "asep/numeric.hpp"
#include "asep/variational.hpp"

using asep::ModelParams;
using asep::PiecewiseFn;
using asep::Problem;

TEST_CASE("obstacle is G shifted by A on the documented domain") {
  const auto m = ModelParams::make(0.75, 0.5);
  const auto one = asep::problem_obstacle(Problem::One, 0.6, m);
  CHECK(one.a == doctest::Approx(0.1));
  CHECK(one.b == doctest::Approx(1.1));
  const auto two = asep::problem_obstacle(Problem::Two, 0.3, m);
  CHECK(two.a == doctest::Approx(0.0));
  CHECK(two.b == doctest::Approx(0.8));
  for (double u = two.a; u <= two.b; u += 0.05) {
    CHECK(two.H(u) == doctest::Approx(asep::flux_G(u - 0.3, m)));
    const double h = 1e-6;
    CHECK(two.dH(u) == doctest::Approx((two.H(u + h) - two.H(u - h)) / (2 * h)).epsilon(1e-5));
  }
  CHECK_NOTHROW(two.validate());
  asep::ObstacleSpec bad = two;
  bad.H = [](double u) { return std::sin(10.0 * u); };
  CHECK_THROWS(bad.validate());
}

TEST_CASE("piecewise functions evaluate and differentiate per segment") {
  PiecewiseFn f;
  f.add_poly(0.0, 1.0, 0.0, 0.0, 1.0);
  f.add_poly(1.0, 2.0, 1.0, 2.0);
  CHECK(f(0.5) == doctest::Approx(0.25));
  CHECK(f(1.5) == doctest::Approx(2.0));
  CHECK(f.derivative(0.5) == doctest::Approx(1.0));
  CHECK(f.junctions() == std::vector<double>{1.0});
  const auto pl = PiecewiseFn::polyline({0.0, 1.0, 3.0}, {0.0, 0.5, 0.5});
  CHECK(pl(2.0) == doctest::Approx(0.5));
  CHECK(pl.derivative(0.5) == doctest::Approx(0.5));
}

TEST_CASE("cost of the slope-rho line is zero and entropy is positive elsewhere") {
  const auto m = ModelParams::make(0.75, 0.4);
  PiecewiseFn line;
  line.add_poly(0.0, 1.0, 0.0, 0.4);
  CHECK(asep::cost_K(line, m) == doctest::Approx(0.0));
  PiecewiseFn other;
  other.add_poly(0.0, 1.0, 0.0, 0.7);
  CHECK(asep::cost_K(other, m) == doctest::Approx(asep::entropy_density(0.7, 0.4)));
}

TEST_CASE("analytic minimizer is admissible and agrees with the general solver") {
  const struct {
    Problem pr;
    double p, rho, A;
  } cases[] = {{Problem::One, 0.75, 0.5, 0.6}, {Problem::One, 0.6, 0.3, 0.3},
               {Problem::Two, 0.75, 0.5, 0.3}, {Problem::Two, 1.0, 0.5, 0.75}};
  for (const auto& c : cases) {
    const auto m = ModelParams::make(c.p, c.rho);
    const auto spec = asep::problem_obstacle(c.pr, c.A, m);
    const auto v = asep::analytic_minimizer(c.pr, c.A, m);
    const auto g = asep::general_minimizer(spec);
    CHECK(v(0.0) == doctest::Approx(0.0));
    for (double u = spec.a; u <= spec.b; u += 1e-3) {
      CHECK(v(u) <= spec.H(u) + 1e-12);
      CHECK(v(u) == doctest::Approx(g(u)).epsilon(1e-9));
    }
    for (double u = v.start(); u < v.end(); u += 1e-3) {
      CHECK(v.derivative(u) >= -1e-12);
      CHECK(v.derivative(u) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("regularized solver converges to a convex function below the obstacle") {
  const auto m = ModelParams::make(0.75, 0.5);
  const auto spec = asep::problem_obstacle(Problem::Two, 0.3, m);
  asep::RegularizedReport rep;
  const auto v = asep::solve_lambda_regularized(spec, 1e3, 1e-2, 1e-2, 1e-2, &rep);
  CHECK(rep.converged);
  CHECK(rep.convex);
  const auto ref = asep::analytic_minimizer(Problem::Two, 0.3, m);
  double gap = 0.0;
  for (double u = spec.a; u <= spec.b; u += 1e-2) gap = std::max(gap, std::abs(v(u) - ref(u)));
  CHECK(gap < 0.05);
  CHECK_THROWS(asep::solve_lambda_regularized(spec, 1e3, 1e-2, 0.6, 1e-2));
}

TEST_CASE("minimizer csv") {
  const auto m = ModelParams::make(0.75, 0.5);
  const auto spec = asep::problem_obstacle(Problem::Two, 0.3, m);
  std::ostringstream os;
  asep::write_minimizer_csv(os, asep::analytic_minimizer(Problem::Two, 0.3, m), spec, 0.1);
  CHECK(os.str().find('\n') != std::string::npos);
}
