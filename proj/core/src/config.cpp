#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "asep/config.hpp"

namespace asep {

namespace {

template <typename E>
struct Named {
  std::string_view name;
  E value;
};

constexpr Named<ExperimentKind> kKinds[] = {
    {"tail", ExperimentKind::Tail},
    {"lln", ExperimentKind::Lln},
    {"poisson-law", ExperimentKind::PoissonLaw},
    {"cumulant", ExperimentKind::Cumulant},
    {"flux", ExperimentKind::Flux},
    {"tabulate-rates", ExperimentKind::TabulateRates},
    {"hydro", ExperimentKind::Hydro},
    {"variational", ExperimentKind::Variational},
    {"simulate", ExperimentKind::Simulate},
    {"slowed-hole", ExperimentKind::SlowedHole},
};
constexpr Named<TailSide> kSides[] = {{"upper", TailSide::Upper}, {"lower", TailSide::Lower}};
constexpr Named<TailMethod> kMethods[] = {
    {"direct", TailMethod::Direct}, {"importance", TailMethod::Importance}, {"exact", TailMethod::Exact}};
constexpr Named<StartKind> kStarts[] = {
    {"equilibrium", StartKind::Equilibrium}, {"step", StartKind::Step}, {"strategy", StartKind::Strategy}};
constexpr Named<FluxReference> kReferences[] = {
    {"empirical", FluxReference::Empirical}, {"profile", FluxReference::Profile}};
constexpr Named<Problem> kProblems[] = {{"one", Problem::One}, {"two", Problem::Two}};

template <typename E, std::size_t K>
std::string_view name_of(const Named<E> (&table)[K], E v) {
  for (const auto& n : table) {
    if (n.value == v) return n.name;
  }
  return "?";
}

template <typename E, std::size_t K>
E parse_enum(const Named<E> (&table)[K], const std::string& key, const std::string& text) {
  for (const auto& n : table) {
    if (n.name == text) return n.value;
  }
  std::string allowed;
  for (const auto& n : table) {
    if (!allowed.empty()) allowed += ", ";
    allowed += n.name;
  }
  throw ConfigError(key, "unknown value '" + text + "' (expected one of " + allowed + ")");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) throw ConfigError(key, "not a number: '" + text + "'");
  return v;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  std::int64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "not an integer: '" + text + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "not an unsigned integer: '" + text + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(parse_double(key, s));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

std::vector<std::int64_t> parse_ints(const std::string& key, const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& s : split_list(text)) out.push_back(parse_int(key, s));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"kind", [](auto& c, auto& k, auto& v) { c.kind = parse_enum(kKinds, k, v); }},
      {"p", [](auto& c, auto& k, auto& v) { c.params.p = parse_double(k, v); }},
      {"rho", [](auto& c, auto& k, auto& v) { c.params.rho = parse_double(k, v); }},
      {"A", [](auto& c, auto& k, auto& v) { c.A = parse_double(k, v); }},
      {"regime",
       [](auto& c, auto& k, auto& v) {
         try {
           c.regime = regime_from_string(v);
         } catch (const std::invalid_argument&) {
           throw ConfigError(k, "unknown regime '" + v + "'");
         }
       }},
      {"N", [](auto& c, auto& k, auto& v) { c.Ns = parse_ints(k, v); }},
      {"trajectories", [](auto& c, auto& k, auto& v) { c.trajectories = parse_int(k, v); }},
      {"eps", [](auto& c, auto& k, auto& v) { c.eps = parse_double(k, v); }},
      {"eps_sweep", [](auto& c, auto& k, auto& v) { c.epsSweep = parse_doubles(k, v); }},
      {"seed", [](auto& c, auto& k, auto& v) { c.seed = parse_u64(k, v); }},
      {"window_left", [](auto& c, auto& k, auto& v) { c.windowLeft = parse_double(k, v); }},
      {"window_right", [](auto& c, auto& k, auto& v) { c.windowRight = parse_double(k, v); }},
      {"output_dir", [](auto& c, auto&, auto& v) { c.outputDir = v; }},
      {"side", [](auto& c, auto& k, auto& v) { c.side = parse_enum(kSides, k, v); }},
      {"method", [](auto& c, auto& k, auto& v) { c.method = parse_enum(kMethods, k, v); }},
      {"vacuum_floor", [](auto& c, auto& k, auto& v) { c.vacuumFloor = parse_double(k, v); }},
      {"start", [](auto& c, auto& k, auto& v) { c.start = parse_enum(kStarts, k, v); }},
      {"tolerance", [](auto& c, auto& k, auto& v) { c.tolerance = parse_double(k, v); }},
      {"horizon", [](auto& c, auto& k, auto& v) { c.horizon = parse_double(k, v); }},
      {"lambda_min", [](auto& c, auto& k, auto& v) { c.lambdaMin = parse_double(k, v); }},
      {"lambda_max", [](auto& c, auto& k, auto& v) { c.lambdaMax = parse_double(k, v); }},
      {"lambda_count", [](auto& c, auto& k, auto& v) { c.lambdaCount = parse_int(k, v); }},
      {"eps_test", [](auto& c, auto& k, auto& v) { c.epsTest = parse_double(k, v); }},
      {"flux_reference", [](auto& c, auto& k, auto& v) { c.fluxReference = parse_enum(kReferences, k, v); }},
      {"flux_times", [](auto& c, auto& k, auto& v) { c.fluxTimes = parse_doubles(k, v); }},
      {"flux_L", [](auto& c, auto& k, auto& v) { c.fluxL = parse_doubles(k, v); }},
      {"a_min", [](auto& c, auto& k, auto& v) { c.aMin = parse_double(k, v); }},
      {"a_max", [](auto& c, auto& k, auto& v) { c.aMax = parse_double(k, v); }},
      {"a_count", [](auto& c, auto& k, auto& v) { c.aCount = parse_int(k, v); }},
      {"times", [](auto& c, auto& k, auto& v) { c.times = parse_doubles(k, v); }},
      {"u_min", [](auto& c, auto& k, auto& v) { c.uMin = parse_double(k, v); }},
      {"u_max", [](auto& c, auto& k, auto& v) { c.uMax = parse_double(k, v); }},
      {"u_step", [](auto& c, auto& k, auto& v) { c.uStep = parse_double(k, v); }},
      {"problem", [](auto& c, auto& k, auto& v) { c.problem = parse_enum(kProblems, k, v); }},
      {"reg_lambda", [](auto& c, auto& k, auto& v) { c.regLambda = parse_double(k, v); }},
      {"reg_delta", [](auto& c, auto& k, auto& v) { c.regDelta = parse_double(k, v); }},
      {"reg_eps", [](auto& c, auto& k, auto& v) { c.regEps = parse_double(k, v); }},
      {"grid_step", [](auto& c, auto& k, auto& v) { c.gridStep = parse_double(k, v); }},
  };
  return table;
}

std::vector<std::string> required_keys(ExperimentKind k, const ExperimentConfig& c) {
  switch (k) {
    case ExperimentKind::Tail: return {"p", "rho", "A", "N"};
    case ExperimentKind::Lln:
      return c.start == StartKind::Strategy ? std::vector<std::string>{"p", "rho", "N", "A"}
                                            : std::vector<std::string>{"p", "rho", "N"};
    case ExperimentKind::PoissonLaw: return {"rho"};
    case ExperimentKind::Cumulant: return {"p", "rho", "N"};
    case ExperimentKind::Flux: return {"p", "rho", "N"};
    case ExperimentKind::TabulateRates: return {"p", "rho"};
    case ExperimentKind::Hydro: return {"p", "rho", "A"};
    case ExperimentKind::Variational: return {"p", "rho", "A", "problem"};
    case ExperimentKind::Simulate: return {"p", "rho", "N"};
    case ExperimentKind::SlowedHole: return {"rho", "N"};
  }
  return {};
}

}  // namespace

std::string_view to_string(ExperimentKind k) { return name_of(kKinds, k); }
std::string_view to_string(TailSide s) { return name_of(kSides, s); }
std::string_view to_string(TailMethod m) { return name_of(kMethods, m); }
std::string_view to_string(StartKind s) { return name_of(kStarts, s); }

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
  }();
  return keys;
}

Window ExperimentConfig::window_for(std::int64_t /*N*/) const {
  const double g = params.gamma;
  double left = 1.0 + g + std::max(0.0, -A);
  if (params.tasep() && kind != ExperimentKind::Flux) left = 0.0;
  double right = std::max(A + eps, g) + 0.75;
  if (kind == ExperimentKind::PoissonLaw) right = 4.0;
  if (kind == ExperimentKind::SlowedHole) right = params.rho + 1.0;
  return Window{windowLeft.value_or(left), windowRight.value_or(right)};
}

StrategyRegime ExperimentConfig::resolved_regime() const {
  return regime ? *regime : classify_regime(A, params);
}

void ExperimentConfig::validate() const {
  if (!(params.p > 0.5 && params.p <= 1.0)) throw ConfigError("p", "must lie in (1/2, 1]");
  if (!(params.rho > 0.0 && params.rho < 1.0)) throw ConfigError("rho", "must lie in (0, 1)");
  if (trajectories < 1) throw ConfigError("trajectories", "must be >= 1");
  for (auto N : Ns) {
    if (N < 8) throw ConfigError("N", "every N must be >= 8");
  }
  if (!(eps > 0.0)) throw ConfigError("eps", "must be positive");
  for (double e : epsSweep) {
    if (!(e > 0.0)) throw ConfigError("eps_sweep", "entries must be positive");
  }
  if (windowLeft && !(*windowLeft >= 0.0)) throw ConfigError("window_left", "must be >= 0");
  if (windowRight && !(*windowRight > 0.0)) throw ConfigError("window_right", "must be positive");
  if (!(vacuumFloor >= 0.0 && vacuumFloor < 1.0)) throw ConfigError("vacuum_floor", "must lie in [0, 1)");

  const bool needsRegime = (kind == ExperimentKind::Tail && method == TailMethod::Importance) ||
                           (kind == ExperimentKind::Lln && start == StartKind::Strategy) ||
                           kind == ExperimentKind::Hydro ||
                           (kind == ExperimentKind::Flux && start == StartKind::Strategy) ||
                           (kind == ExperimentKind::Simulate && start == StartKind::Strategy);
  if (needsRegime) {
    StrategyRegime r;
    try {
      r = resolved_regime();
    } catch (const std::exception& e) {
      throw ConfigError("A", e.what());
    }
    const double sweepMax = epsSweep.empty() ? eps : *std::max_element(epsSweep.begin(), epsSweep.end());
    try {
      (void)build_strategy_profile(r, A, std::max(eps, sweepMax), params);
      (void)build_strategy_profile(r, A, eps, params);
    } catch (const std::exception& e) {
      throw ConfigError(regime ? "regime" : "A", e.what());
    }
    if (kind == ExperimentKind::Tail && r == StrategyRegime::LowerNonentropic && A != 0.0)
      throw ConfigError("A", "importance sampling for LowerNonentropic requires A = 0");
  }
  if (kind == ExperimentKind::Tail && method == TailMethod::Exact && !params.tasep())
    throw ConfigError("method", "exact Poisson tail requires TASEP (p = 1)");
  if (kind == ExperimentKind::PoissonLaw) {
    if (!params.tasep()) throw ConfigError("p", "poisson-law requires TASEP (p = 1)");
    if (!(horizon > 0.0)) throw ConfigError("horizon", "must be positive");
  }
  if (kind == ExperimentKind::SlowedHole) {
    if (!params.tasep()) throw ConfigError("p", "slowed-hole requires TASEP (p = 1)");
    if (!(eps <= params.rho)) throw ConfigError("eps", "slowed-hole requires eps <= rho");
  }
  if (kind == ExperimentKind::Cumulant) {
    if (lambdaCount < 2) throw ConfigError("lambda_count", "must be >= 2");
    if (!(lambdaMax > lambdaMin)) throw ConfigError("lambda_max", "must exceed lambda_min");
  }
  if (kind == ExperimentKind::Lln && !(tolerance > 0.0)) throw ConfigError("tolerance", "must be positive");
  if (kind == ExperimentKind::TabulateRates) {
    if (aCount < 2) throw ConfigError("a_count", "must be >= 2");
    if (!(aMax > aMin)) throw ConfigError("a_max", "must exceed a_min");
  }
  if (kind == ExperimentKind::Hydro) {
    if (!(uMax > uMin)) throw ConfigError("u_max", "must exceed u_min");
    if (!(uStep > 0.0)) throw ConfigError("u_step", "must be positive");
    for (double t : times) {
      if (!(t > 0.0 && t <= 1.0)) throw ConfigError("times", "entries must lie in (0, 1]");
    }
  }
  if (kind == ExperimentKind::Flux) {
    for (double t : fluxTimes) {
      if (!(t > 0.0 && t <= 1.0)) throw ConfigError("flux_times", "entries must lie in (0, 1]");
    }
  }
  if (kind == ExperimentKind::Variational) {
    if (!(regLambda > 0.0)) throw ConfigError("reg_lambda", "must be positive");
    if (!(regDelta > 0.0)) throw ConfigError("reg_delta", "must be positive");
    if (!(regEps > 0.0)) throw ConfigError("reg_eps", "must be positive");
    if (!(gridStep > 0.0)) throw ConfigError("grid_step", "must be positive");
    try {
      (void)problem_obstacle(problem, A, params);
    } catch (const std::exception& e) {
      throw ConfigError("A", e.what());
    }
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", "line " + std::to_string(lineNo) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineNo) + ": empty key");
    if (c.raw.count(key)) throw ConfigError(key, "duplicate key");
    if (value.empty()) throw ConfigError(key, "empty value");
    c.raw[key] = value;
  }
  if (!c.raw.count("kind")) throw ConfigError("kind", "missing required key");
  const auto& table = setters();
  setters().at("kind")(c, "kind", c.raw.at("kind"));
  // start must be known before the required-key check.
  if (c.raw.count("start")) table.at("start")(c, "start", c.raw.at("start"));
  for (const auto& key : required_keys(c.kind, c)) {
    if (!c.raw.count(key)) throw ConfigError(key, "missing required key");
  }
  for (const auto& [key, value] : c.raw) {
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError(key, "unknown key");
    it->second(c, key, value);
  }
  const double p = c.params.p;
  if (!(p > 0.5 && p <= 1.0)) throw ConfigError("p", "must lie in (1/2, 1]");
  if (!(c.params.rho > 0.0 && c.params.rho < 1.0)) throw ConfigError("rho", "must lie in (0, 1)");
  c.params = ModelParams::make(p, c.params.rho);
  if (!c.raw.count("side") && c.kind == ExperimentKind::Tail && (c.regime || c.method == TailMethod::Importance)) {
    StrategyRegime r;
    try {
      r = c.resolved_regime();
    } catch (const std::exception& e) {
      throw ConfigError("A", e.what());
    }
    const bool upper = r == StrategyRegime::UpperFar || r == StrategyRegime::UpperNear;
    c.side = upper ? TailSide::Upper : TailSide::Lower;
  }
  return c;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  return parse_config(in);
}

}  // namespace asep
