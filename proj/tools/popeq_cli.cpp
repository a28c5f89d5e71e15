// popeq: run one study from a JSON experiment config.
//
//   popeq --config experiment.json [--study convergence] [--out dir] [--jobs 4] [--seed 7]

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "popeq/config.hpp"
#include "popeq/error.hpp"
#include "popeq/parallel.hpp"
#include "popeq/run.hpp"

namespace {

int report_error(std::string_view kind, const std::string& message, int code) {
  nlohmann::json err{{"error", {{"kind", std::string(kind)}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium distributions of density-dependent population processes"};
  std::string config_path;
  std::optional<std::string> study;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  unsigned jobs = popeq::default_jobs();
  app.add_option("--config", config_path, "Experiment config (JSON)")->required();
  app.add_option("--study", study, "Override the study named in the config");
  app.add_option("--out", out_dir, "Override the output directory");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Override the simulation seed");
  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json doc;
    {
      std::ifstream in(config_path);
      if (!in) throw popeq::Error(popeq::ErrorKind::ConfigError, "cannot open config file '" + config_path + "'");
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw popeq::Error(popeq::ErrorKind::ConfigError, std::string("config is not valid JSON: ") + e.what());
      }
    }
    if (!doc.is_object()) throw popeq::Error(popeq::ErrorKind::ConfigError, "config must be a JSON object");
    if (study) doc["study"] = *study;
    if (out_dir) doc["output"]["dir"] = *out_dir;
    if (seed) doc["simulation"]["seed"] = *seed;
    const auto cfg = popeq::parse_config(doc);
    const auto result = popeq::run(cfg, jobs);
    std::cout << result.summary << '\n';
    return 0;
  } catch (const popeq::Error& e) {
    return report_error(e.name(), e.what(), e.kind() == popeq::ErrorKind::ConfigError ? 2 : 1);
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what(), 1);
  }
}
