#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "asep/lattice.hpp"
#include "asep/model.hpp"
#include "asep/variational.hpp"

namespace asep {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class ExperimentKind {
  Tail,
  Lln,
  PoissonLaw,
  Cumulant,
  Flux,
  TabulateRates,
  Hydro,
  Variational,
  Simulate,
  SlowedHole,
};

enum class TailSide { Upper, Lower };
enum class TailMethod { Direct, Importance, Exact };
enum class StartKind { Equilibrium, Step, Strategy };
enum class FluxReference { Empirical, Profile };

std::string_view to_string(ExperimentKind k);
std::string_view to_string(TailSide s);
std::string_view to_string(TailMethod m);
std::string_view to_string(StartKind s);

// Flat key = value configuration; '#' starts a comment, lists are comma separated.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Tail;
  ModelParams params;
  std::optional<StrategyRegime> regime;
  double A = 0.0;
  std::vector<std::int64_t> Ns{64};
  std::int64_t trajectories = 1000;
  double eps = 0.05;
  std::vector<double> epsSweep;
  std::uint64_t seed = 1;
  std::optional<double> windowLeft;
  std::optional<double> windowRight;
  std::string outputDir = ".";

  TailSide side = TailSide::Upper;
  TailMethod method = TailMethod::Direct;
  double vacuumFloor = 0.0;

  StartKind start = StartKind::Equilibrium;
  double tolerance = 0.02;
  double horizon = 32.0;

  double lambdaMin = -1.0;
  double lambdaMax = 1.0;
  std::int64_t lambdaCount = 21;

  double epsTest = 0.05;
  FluxReference fluxReference = FluxReference::Empirical;
  std::vector<double> fluxTimes{0.25, 0.5, 0.75, 1.0};
  std::vector<double> fluxL{-0.5, -0.25, 0.0, 0.25, 0.5, 0.75};

  double aMin = -0.5;
  double aMax = 1.5;
  std::int64_t aCount = 201;

  std::vector<double> times{0.25, 0.5, 1.0};
  double uMin = -1.0;
  double uMax = 2.0;
  double uStep = 1.0 / 64.0;

  Problem problem = Problem::One;
  double regLambda = 1e4;
  double regDelta = 1e-3;
  double regEps = 1e-3;
  double gridStep = 1e-3;

  // Raw key = value pairs as read, for the JSON echo.
  std::map<std::string, std::string> raw;

  Window window_for(std::int64_t N) const;
  StrategyRegime resolved_regime() const;
  void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);

const std::vector<std::string>& known_config_keys();

}  // namespace asep
