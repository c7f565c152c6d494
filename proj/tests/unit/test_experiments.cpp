#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/math/distributions/poisson.hpp>

#include "asep/checks.hpp"
#include "asep/config.hpp"
#include "asep/csv.hpp"
#include "asep/estimators.hpp"
#include "asep/runner.hpp"

namespace fs = std::filesystem;
using asep::ConfigError;
using asep::parse_config_string;

namespace {

std::string error_key(const std::string& text) {
  try {
    auto c = parse_config_string(text);
    c.validate();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("asep_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing fills typed fields and defaults") {
  const auto c = parse_config_string(
      "# comment\nkind = tail\nmethod = importance\np = 0.75\nrho = 0.5\nA = 0.6  # trailing\n"
      "N = 64, 128\neps = 0.05\nseed = 9\n");
  CHECK(c.kind == asep::ExperimentKind::Tail);
  CHECK(c.method == asep::TailMethod::Importance);
  CHECK(c.params.gamma == doctest::Approx(0.5));
  CHECK(c.Ns == std::vector<std::int64_t>{64, 128});
  CHECK(c.seed == 9);
  CHECK(c.trajectories == 1000);
  CHECK(c.resolved_regime() == asep::StrategyRegime::UpperFar);
  CHECK(c.side == asep::TailSide::Upper);
  CHECK_NOTHROW(c.validate());
  CHECK(c.raw.at("A") == "0.6");
}

TEST_CASE("config errors name the offending key") {
  const std::string base = "kind = lln\np = 0.75\nrho = 0.5\nN = 100\n";
  CHECK(error_key(base + "tolerence = 0.1\n") == "tolerence");
  CHECK(error_key(base + "p = 0.8\n") == "p");
  CHECK(error_key("kind = lln\np = 0.75\nrho = 1.5\nN = 100\n") == "rho");
  CHECK(error_key(base + "trajectories = many\n") == "trajectories");
  CHECK(error_key(base + "start = sideways\n") == "start");
  CHECK(error_key(base + "seed = -3\n") == "seed");
  CHECK(error_key(base + "eps =\n") == "eps");
  CHECK(error_key("kind = tail\np = 0.75\nrho = 0.5\nN = 64\n") == "A");
  CHECK(error_key("kind = teleport\n") == "kind");
  CHECK(error_key("p = 0.75\n") == "kind");
  CHECK(error_key("kind = poisson-law\np = 0.75\nrho = 0.5\n") == "p");
  CHECK(error_key("kind = tail\nmethod = importance\np = 0.75\nrho = 0.5\nA = 0.6\nregime = UpperNear\nN = 64\n") ==
        "regime");
  CHECK(error_key("kind = tail\nmethod = exact\np = 0.75\nrho = 0.5\nA = 0.6\nN = 64\n") == "method");
  CHECK(error_key("kind = variational\np = 0.75\nrho = 0.5\nA = 0.3\nproblem = one\n") == "A");
  CHECK(error_key(base + "N = 4\n") == "N");
  CHECK(error_key(base + "N = 4") == "N");
  CHECK_THROWS_AS(parse_config_string("kind lln\n"), ConfigError);
  CHECK_THROWS_AS(asep::load_config("/nonexistent/asep.cfg"), ConfigError);
}

TEST_CASE("every documented key is known") {
  const auto& keys = asep::known_config_keys();
  for (const char* k : {"kind", "p", "rho", "A", "regime", "N", "trajectories", "eps", "eps_sweep", "seed",
                        "window_left", "window_right", "output_dir", "side", "method", "vacuum_floor", "start",
                        "tolerance", "horizon", "lambda_min", "lambda_max", "lambda_count", "eps_test",
                        "flux_reference", "flux_times", "flux_L", "a_min", "a_max", "a_count", "times", "u_min",
                        "u_max", "u_step", "problem", "reg_lambda", "reg_delta", "reg_eps", "grid_step"}) {
    CHECK(std::find(keys.begin(), keys.end(), k) != keys.end());
  }
}

TEST_CASE("exact Poisson tail matches the regularised gamma function") {
  for (double rho : {0.3, 0.5}) {
    for (std::int64_t N : {16, 64, 256}) {
      const double lambda = (1.0 - rho) * N;
      const boost::math::poisson_distribution<double> dist(lambda);
      for (double A : {0.1, 0.5, 0.75, 1.0}) {
        const auto kUp = asep::upper_threshold(A, N);
        const double up = kUp == 0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, static_cast<double>(kUp - 1)));
        CHECK(asep::exact_poisson_tail(A, rho, N, asep::TailSide::Upper) == doctest::Approx(up).epsilon(1e-10));
        const auto kLo = asep::lower_threshold(A, N);
        CHECK(asep::exact_poisson_tail(A, rho, N, asep::TailSide::Lower) ==
              doctest::Approx(boost::math::cdf(dist, static_cast<double>(kLo))).epsilon(1e-10));
      }
    }
  }
  CHECK(asep::upper_threshold(0.75, 64) == 48);
  CHECK(asep::lower_threshold(0.75, 64) == 48);
  CHECK_THROWS(asep::exact_poisson_tail(0.5, asep::ModelParams::make(0.75, 0.5), 64, asep::TailSide::Upper));
}

TEST_CASE("tail summaries") {
  const auto zero = asep::summarize_tail(64, std::vector<double>(100, 0.0), 0, false);
  CHECK(zero.upperBoundOnly);
  CHECK(zero.pHat == doctest::Approx(0.03));
  CHECK(zero.ciLo == 0.0);
  CHECK(zero.lowHitWarning);
  std::vector<double> s(1000, 0.0);
  for (int i = 0; i < 250; ++i) s[i] = 1.0;
  const auto e = asep::summarize_tail(10, s, 250, false);
  CHECK(e.pHat == doctest::Approx(0.25));
  CHECK(e.stdError == doctest::Approx(std::sqrt(0.25 * 0.75 / 999.0)).epsilon(1e-3));
  CHECK(e.rateHat == doctest::Approx(-std::log(0.25) / 10.0));
  std::vector<double> w{0.0, 0.0, 2.0, 2.0};
  const auto is = asep::summarize_tail(10, w, 2, true);
  REQUIRE(is.effectiveSampleSize);
  CHECK(*is.effectiveSampleSize == doctest::Approx(2.0));
  CHECK(*is.qFrequency == doctest::Approx(0.5));
  CHECK(is.degenerateWeights);
}

TEST_CASE("chi-square pools sparse bins and accepts Poisson quantile data") {
  const double mean = 8.0;
  using Policy = boost::math::policies::policy<
      boost::math::policies::discrete_quantile<boost::math::policies::integer_round_up>>;
  const boost::math::poisson_distribution<double, Policy> dist(mean);
  std::vector<std::int64_t> samples;
  const int M = 5000;
  for (int i = 0; i < M; ++i) {
    samples.push_back(static_cast<std::int64_t>(boost::math::quantile(dist, (i + 0.5) / M)));
  }
  const auto rep = asep::chi_square_poisson(samples, mean);
  for (const auto& b : rep.bins) CHECK(b.expected >= 5.0);
  CHECK(rep.pValue > 0.5);
  std::vector<std::int64_t> shifted;
  for (auto x : samples) shifted.push_back(x + 2);
  CHECK(asep::chi_square_poisson(shifted, mean).pValue < 1e-6);
}

TEST_CASE("empirical cumulant and grid Legendre transform") {
  const std::vector<std::int64_t> X{0, 2, 4};
  const std::vector<double> lambdas{-1.0, 0.0, 1.0};
  const auto c = asep::empirical_cumulant(X, 2, lambdas);
  CHECK(c[1] == 0.0);
  CHECK(c[2] == doctest::Approx(std::log((1.0 + std::exp(2.0) + std::exp(4.0)) / 3.0) / 2.0));
  double arg = 0.0;
  const double v = asep::legendre_on_grid(lambdas, {0.5, 0.0, 0.5}, 2.0, &arg);
  CHECK(v == doctest::Approx(1.5));
  CHECK(arg == 1.0);
}

TEST_CASE("configuration profile is the step density of the occupancy") {
  const auto s = asep::LatticeState::from_occupancy(-2, {1, 0, 1, 1, 0}, 0, 4);
  const auto p = asep::configuration_profile(s);
  CHECK(p(-0.5) == doctest::Approx(1.0));
  CHECK(p(-0.2) == doctest::Approx(0.0));
  CHECK(p(0.1) == doctest::Approx(1.0));
  CHECK(p.integral(-1.0, 1.0) == doctest::Approx(0.75));
  const auto t = asep::truncate_profile(asep::Profile::constant(0.5), -1.0, 1.0);
  CHECK(t.integral(-5.0, 5.0) == doctest::Approx(1.0));
}

TEST_CASE("csv escaping and number formatting") {
  CHECK(asep::csv_escape("plain") == "plain");
  CHECK(asep::csv_escape("a,b") == "\"a,b\"");
  CHECK(asep::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(asep::format_double(0.1) == "0.1");
  CHECK(std::stod(asep::format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(asep::format_double(std::nan("")) == "nan");
}

TEST_CASE("runs are byte-identical across repeats and worker counts") {
  const auto dir = scratch_dir("determinism");
  const std::string text =
      "kind = tail\nmethod = importance\np = 0.75\nrho = 0.5\nA = 0.6\nN = 16,24\ntrajectories = 300\nseed = 3\n";
  std::string first;
  for (const char* workers : {"1", "3", "1"}) {
    ::setenv("ASEP_LD_WORKERS", workers, 1);
    auto c = parse_config_string(text);
    c.outputDir = (dir / workers).string();
    c.validate();
    const auto out = asep::run_experiment(c);
    const std::string csv = slurp(out.csvPath);
    CHECK(csv.rfind("N,method,eps,", 0) == 0);
    if (first.empty()) first = csv;
    CHECK(csv == first);
    CHECK(slurp(out.jsonPath).find("\"schemaVersion\": 1") != std::string::npos);
  }
  ::unsetenv("ASEP_LD_WORKERS");
}

TEST_CASE("run reports configuration errors as JSON with exit code 2") {
  const auto dir = scratch_dir("errors");
  const auto path = (dir / "bad.cfg").string();
  std::ofstream(path) << "kind = lln\np = 0.75\nrho = 0.5\nN = 100\nwindow_right = -1\n";
  std::ostringstream err;
  CHECK(asep::run(path, {}, err) == 2);
  CHECK(err.str().find("\"key\":\"window_right\"") != std::string::npos);
  CHECK(asep::error_json("", "x").find("null") != std::string::npos);
}

TEST_CASE("every experiment kind runs end to end at small size") {
  const auto dir = scratch_dir("kinds");
  const std::vector<std::string> configs = {
      "kind = tail\nmethod = direct\np = 1\nrho = 0.5\nA = 0.75\nN = 16\ntrajectories = 200\n",
      "kind = tail\nmethod = exact\np = 1\nrho = 0.5\nA = 0.75\nN = 16,64\n",
      "kind = tail\nmethod = importance\np = 1\nrho = 0.5\nA = 0\nN = 16\ntrajectories = 50\neps = 0.1\n",
      "kind = lln\np = 0.75\nrho = 0.5\nN = 50\ntrajectories = 20\nstart = step\n",
      "kind = lln\np = 0.75\nrho = 0.5\nN = 50\ntrajectories = 20\nstart = strategy\nA = 0.4\n",
      "kind = poisson-law\np = 1\nrho = 0.5\nhorizon = 8\ntrajectories = 200\n",
      "kind = cumulant\np = 1\nrho = 0.5\nN = 16\ntrajectories = 200\nlambda_count = 5\n",
      "kind = flux\np = 0.75\nrho = 0.5\nN = 32\ntrajectories = 10\n",
      "kind = flux\np = 0.75\nrho = 0.5\nN = 32\ntrajectories = 10\nstart = strategy\nA = 0.6\n"
      "flux_reference = profile\n",
      "kind = tabulate-rates\np = 0.75\nrho = 0.5\na_count = 11\n",
      "kind = hydro\np = 0.75\nrho = 0.5\nA = 0.4\nu_step = 0.25\n",
      "kind = variational\np = 0.75\nrho = 0.5\nA = 0.3\nproblem = two\nreg_lambda = 1e3\nreg_delta = 1e-2\n"
      "reg_eps = 1e-2\ngrid_step = 1e-2\n",
      "kind = simulate\np = 0.75\nrho = 0.5\nN = 20\ntrajectories = 3\n",
      "kind = slowed-hole\np = 1\nrho = 0.5\neps = 0.1\nN = 20\ntrajectories = 10\n",
  };
  int i = 0;
  for (const auto& text : configs) {
    CAPTURE(text);
    auto c = parse_config_string(text);
    c.outputDir = (dir / std::to_string(i++)).string();
    c.validate();
    const auto out = asep::run_experiment(c);
    CHECK(fs::file_size(out.csvPath) > 0);
    CHECK(fs::file_size(out.jsonPath) > 0);
  }
}
