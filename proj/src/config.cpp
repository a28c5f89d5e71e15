#include "popeq/config.hpp"

#include <fstream>
#include <set>

#include "popeq/error.hpp"

namespace popeq {

using nlohmann::json;

std::string_view study_name(Study study) noexcept {
  switch (study) {
    case Study::Equilibrium: return "equilibrium";
    case Study::StationaryOnce: return "stationary";
    case Study::SteinAudit: return "stein_audit";
    case Study::Simulate: return "simulate";
    case Study::Convergence: return "convergence";
    case Study::Assumptions: return "assumptions";
  }
  return "unknown";
}

Study parse_study(std::string_view name) {
  if (name == "equilibrium" || name == "Equilibrium") return Study::Equilibrium;
  if (name == "stationary" || name == "StationaryOnce") return Study::StationaryOnce;
  if (name == "stein_audit" || name == "SteinAudit") return Study::SteinAudit;
  if (name == "simulate" || name == "Simulate") return Study::Simulate;
  if (name == "convergence" || name == "Convergence") return Study::Convergence;
  if (name == "assumptions" || name == "Assumptions") return Study::Assumptions;
  throw Error(ErrorKind::ConfigError, "unknown study '" + std::string(name) + "'");
}

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

std::string_view solver_name(StationarySolver s) {
  switch (s) {
    case StationarySolver::Auto: return "auto";
    case StationarySolver::Direct: return "direct";
    case StationarySolver::Uniformization: return "uniformization";
  }
  return "auto";
}

StationarySolver parse_solver(const std::string& s) {
  if (s == "auto") return StationarySolver::Auto;
  if (s == "direct") return StationarySolver::Direct;
  if (s == "uniformization") return StationarySolver::Uniformization;
  fail("unknown solver '" + s + "'");
}

template <class T>
T get_as(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail("field '" + where + key + "' is missing or has the wrong type");
  }
}

template <class T>
std::optional<T> get_opt(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return get_as<T>(obj, key, where);
}

Interval parse_interval(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail("'" + what + "' must be a two-element numeric array");
  Interval iv{v[0].get<double>(), v[1].get<double>()};
  if (!(iv.hi > iv.lo)) fail("'" + what + "' must have lo < hi");
  return iv;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) fail("unknown field '" + where + key + "'");
}

}  // namespace

ModelSpec model_from_json(const json& block) {
  if (!block.is_object()) fail("'model' must be an object");
  const auto family = get_as<std::string>(block, "family", "model.");
  try {
    if (family == "bdi" || family == "BdiGroupBirths") {
      reject_unknown(block, {"family", "a", "b", "d", "offspring"}, "model.");
      BdiParams p;
      p.a = get_as<double>(block, "a", "model.");
      p.b = get_opt<double>(block, "b", "model.").value_or(0.0);
      p.d = get_as<double>(block, "d", "model.");
      if (block.contains("offspring")) {
        p.offspring.clear();
        const auto& q = block.at("offspring");
        if (!q.is_array()) fail("'model.offspring' must be a list of [j, q_j] pairs");
        for (const auto& pair : q) {
          if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number())
            fail("'model.offspring' entries must be [integer j, q_j]");
          p.offspring[pair[0].get<int>()] += pair[1].get<double>();
        }
      }
      return ModelSpec::bdi(std::move(p));
    }
    if (family == "affine" || family == "AffineRates") {
      reject_unknown(block, {"family", "rates"}, "model.");
      std::map<int, AffineRate> rates;
      for (const auto& r : block.at("rates")) {
        const int j = get_as<int>(r, "j", "model.rates[].");
        if (rates.count(j)) fail("duplicate jump " + std::to_string(j) + " in model.rates");
        rates[j] = AffineRate{get_opt<double>(r, "u", "model.rates[].").value_or(0.0),
                              get_opt<double>(r, "v", "model.rates[].").value_or(0.0)};
      }
      return ModelSpec::affine(std::move(rates));
    }
    if (family == "tabulated" || family == "TabulatedRates") {
      reject_unknown(block, {"family", "rates"}, "model.");
      std::map<int, RateFn> rates;
      for (const auto& r : block.at("rates")) {
        const int j = get_as<int>(r, "j", "model.rates[].");
        if (rates.count(j)) fail("duplicate jump " + std::to_string(j) + " in model.rates");
        rates[j] = interpolated_rate(get_as<std::vector<double>>(r, "z", "model.rates[]."),
                                     get_as<std::vector<double>>(r, "rate", "model.rates[]."));
      }
      return ModelSpec::tabulated(std::move(rates));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    fail(std::string("invalid model: ") + e.what());
  } catch (const json::exception& e) {
    fail(std::string("invalid model block: ") + e.what());
  }
  fail("unknown model family '" + family + "'");
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) fail("config must be a JSON object");
  reject_unknown(doc,
                 {"model", "study", "n", "n_grid", "bracket", "truncation", "simulation", "delta", "delta_prime",
                  "stein", "assumptions", "output"},
                 "");
  ExperimentConfig cfg;
  if (!doc.contains("model")) fail("field 'model' is required");
  cfg.model = doc.at("model");
  model_from_json(cfg.model);  // validate now

  cfg.study = parse_study(get_as<std::string>(doc, "study", ""));
  cfg.n = get_opt<long>(doc, "n", "");
  if (cfg.n && *cfg.n <= 0) fail("'n' must be positive");
  if (doc.contains("n_grid")) {
    cfg.n_grid = get_as<std::vector<long>>(doc, "n_grid", "");
    for (long n : cfg.n_grid)
      if (n <= 0) fail("'n_grid' entries must be positive");
  }
  if (doc.contains("bracket")) cfg.bracket = parse_interval(doc.at("bracket"), "bracket");

  if (doc.contains("truncation")) {
    const auto& t = doc.at("truncation");
    reject_unknown(t, {"k", "max_window", "solver"}, "truncation.");
    cfg.k = get_opt<double>(t, "k", "truncation.").value_or(cfg.k);
    cfg.max_window = get_opt<State>(t, "max_window", "truncation.").value_or(cfg.max_window);
    if (auto s = get_opt<std::string>(t, "solver", "truncation.")) cfg.solver = parse_solver(*s);
    if (!(cfg.k >= 3.0)) fail("'truncation.k' must be at least 3");
    if (cfg.max_window < 3) fail("'truncation.max_window' is too small");
  }
  if (doc.contains("simulation")) {
    const auto& s = doc.at("simulation");
    reject_unknown(s, {"seed", "t_sample", "t_burn", "replicas"}, "simulation.");
    cfg.seed = get_opt<std::uint64_t>(s, "seed", "simulation.").value_or(cfg.seed);
    cfg.t_sample = get_opt<double>(s, "t_sample", "simulation.");
    cfg.t_burn = get_opt<double>(s, "t_burn", "simulation.");
    cfg.replicas = get_opt<int>(s, "replicas", "simulation.").value_or(cfg.replicas);
    if (cfg.replicas < 1) fail("'simulation.replicas' must be >= 1");
    if (cfg.t_sample && !(*cfg.t_sample > 0.0)) fail("'simulation.t_sample' must be > 0");
    if (cfg.t_burn && !(*cfg.t_burn >= 0.0)) fail("'simulation.t_burn' must be >= 0");
  }
  cfg.delta = get_opt<double>(doc, "delta", "");
  cfg.delta_prime = get_opt<double>(doc, "delta_prime", "");
  if (cfg.delta && !(*cfg.delta > 0.0)) fail("'delta' must be > 0");
  if (cfg.delta_prime && !(*cfg.delta_prime > 0.0)) fail("'delta_prime' must be > 0");
  if (cfg.delta && cfg.delta_prime && *cfg.delta_prime > *cfg.delta) fail("'delta_prime' must not exceed 'delta'");

  if (doc.contains("stein")) {
    const auto& s = doc.at("stein");
    reject_unknown(s, {"v", "window_sds"}, "stein.");
    if (s.contains("v")) cfg.stein_v = get_as<std::vector<double>>(s, "v", "stein.");
    cfg.stein_window_sds = get_opt<double>(s, "window_sds", "stein.").value_or(cfg.stein_window_sds);
    for (double v : cfg.stein_v)
      if (!(v > 0.0)) fail("'stein.v' entries must be > 0");
    if (!(cfg.stein_window_sds > 0.0)) fail("'stein.window_sds' must be > 0");
  }
  if (doc.contains("assumptions")) {
    const auto& a = doc.at("assumptions");
    reject_unknown(a, {"window", "eta"}, "assumptions.");
    if (a.contains("window")) cfg.assumption_window = parse_interval(a.at("window"), "assumptions.window");
    if (a.contains("eta")) cfg.eta_grid = get_as<std::vector<double>>(a, "eta", "assumptions.");
  }
  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    reject_unknown(o, {"dir", "formats"}, "output.");
    cfg.output.dir = get_opt<std::string>(o, "dir", "output.").value_or(cfg.output.dir);
    if (o.contains("formats")) {
      cfg.output.csv = cfg.output.json = cfg.output.plotdata = false;
      for (const auto& f : get_as<std::vector<std::string>>(o, "formats", "output.")) {
        if (f == "csv") cfg.output.csv = true;
        else if (f == "json") cfg.output.json = true;
        else if (f == "plotdata") cfg.output.plotdata = true;
        else fail("unknown output format '" + f + "'");
      }
    }
  }

  switch (cfg.study) {
    case Study::Convergence:
      if (cfg.n_grid.empty()) fail("study 'convergence' requires a nonempty 'n_grid'");
      break;
    case Study::StationaryOnce:
    case Study::Simulate:
      if (!cfg.n) fail("study '" + std::string(study_name(cfg.study)) + "' requires 'n'");
      break;
    case Study::SteinAudit:
      if (cfg.stein_v.empty() && !cfg.n) fail("study 'stein_audit' requires 'stein.v' or 'n'");
      break;
    default:
      break;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["model"] = cfg.model;
  doc["study"] = std::string(study_name(cfg.study));
  if (cfg.n) doc["n"] = *cfg.n;
  if (!cfg.n_grid.empty()) doc["n_grid"] = cfg.n_grid;
  if (cfg.bracket) doc["bracket"] = {cfg.bracket->lo, cfg.bracket->hi};
  doc["truncation"] = {{"k", cfg.k}, {"max_window", cfg.max_window}, {"solver", std::string(solver_name(cfg.solver))}};
  json sim{{"seed", cfg.seed}, {"replicas", cfg.replicas}};
  if (cfg.t_sample) sim["t_sample"] = *cfg.t_sample;
  if (cfg.t_burn) sim["t_burn"] = *cfg.t_burn;
  doc["simulation"] = sim;
  if (cfg.delta) doc["delta"] = *cfg.delta;
  if (cfg.delta_prime) doc["delta_prime"] = *cfg.delta_prime;
  json stein{{"window_sds", cfg.stein_window_sds}};
  if (!cfg.stein_v.empty()) stein["v"] = cfg.stein_v;
  doc["stein"] = stein;
  json assume{{"eta", cfg.eta_grid}};
  if (cfg.assumption_window) assume["window"] = {cfg.assumption_window->lo, cfg.assumption_window->hi};
  doc["assumptions"] = assume;
  std::vector<std::string> formats;
  if (cfg.output.csv) formats.push_back("csv");
  if (cfg.output.json) formats.push_back("json");
  if (cfg.output.plotdata) formats.push_back("plotdata");
  doc["output"] = {{"dir", cfg.output.dir}, {"formats", formats}};
  return doc;
}

}  // namespace popeq
