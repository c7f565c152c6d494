#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asep/config.hpp"
#include "asep/runner.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::int64_t> Ns;
  std::optional<std::int64_t> trajectories;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "key = value experiment file")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--N", o.Ns, "scaling parameters, overrides the config list")->delimiter(',');
  sub->add_option("--trajectories", o.trajectories, "trajectory count")->check(CLI::PositiveNumber);
}

int dispatch(const std::string& name, const Options& o, const std::set<asep::ExperimentKind>& allowed,
             bool validateOnly) {
  try {
    asep::ExperimentConfig c = asep::load_config(o.config);
    asep::RunOverrides ov;
    ov.seed = o.seed;
    ov.outputDir = o.out;
    if (!o.Ns.empty()) ov.Ns = o.Ns;
    ov.trajectories = o.trajectories;
    asep::apply_overrides(c, ov);
    if (!allowed.empty() && !allowed.count(c.kind)) {
      throw asep::ConfigError("kind", "kind '" + std::string(asep::to_string(c.kind)) +
                                          "' is not handled by the '" + name + "' subcommand");
    }
    c.validate();
    if (validateOnly) {
      std::cout << "{\"valid\": true, \"kind\": \"" << asep::to_string(c.kind) << "\"}\n";
      return 0;
    }
    const asep::RunOutput out = asep::run_experiment(c);
    std::cout << out.csvPath << '\n' << out.jsonPath << '\n';
    return 0;
  } catch (const asep::ConfigError& e) {
    std::cerr << asep::error_json(e.key(), e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << asep::error_json("", e.what()) << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using K = asep::ExperimentKind;
  CLI::App app{"Tagged-particle large deviations in asymmetric exclusion: simulation and numerics"};
  app.require_subcommand(1);

  struct Sub {
    std::string name;
    std::string help;
    std::set<K> kinds;
    bool validateOnly;
  };
  const std::vector<Sub> subs = {
      {"simulate", "trajectory experiments: simulate, lln, poisson-law, cumulant, flux, slowed-hole",
       {K::Simulate, K::Lln, K::PoissonLaw, K::Cumulant, K::Flux, K::SlowedHole}, false},
      {"tail", "direct, importance-sampled or exact tail probabilities", {K::Tail}, false},
      {"hydro", "closed-form and Hopf-Lax evolutions of strategy profiles", {K::Hydro}, false},
      {"variational", "regularized and analytic obstacle-problem minimizers", {K::Variational}, false},
      {"rates", "rate-function table over an A grid", {K::TabulateRates}, false},
      {"validate", "parse and validate a config without running it", {}, true},
  };
  std::vector<Options> opts(subs.size());
  std::vector<CLI::App*> apps;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    CLI::App* sub = app.add_subcommand(subs[i].name, subs[i].help);
    add_common(sub, opts[i]);
    apps.push_back(sub);
  }
  CLI11_PARSE(app, argc, argv);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (apps[i]->parsed()) return dispatch(subs[i].name, opts[i], subs[i].kinds, subs[i].validateOnly);
  }
  return 1;
}
