#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "popeq/config.hpp"

namespace popeq {

struct RunResult {
  std::string summary;  // one line, printed by the CLI
  nlohmann::json report;
  std::vector<std::filesystem::path> files;
};

/// Dispatches to the configured study and writes its outputs under
/// cfg.output.dir. Module errors propagate unchanged.
RunResult run(const ExperimentConfig& cfg, unsigned jobs);

}  // namespace popeq
