#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "popeq/model.hpp"
#include "popeq/stationary.hpp"

namespace popeq {

enum class Study { Equilibrium, StationaryOnce, SteinAudit, Simulate, Convergence, Assumptions };

std::string_view study_name(Study study) noexcept;
/// Accepts the canonical snake_case names ("stationary", "stein_audit", ...)
/// and the CamelCase enum spellings. Throws ConfigError otherwise.
Study parse_study(std::string_view name);

struct OutputSpec {
  std::string dir = "out";
  bool csv = true;
  bool json = true;
  bool plotdata = false;
};

struct ExperimentConfig {
  nlohmann::json model;  // family + parameters, kept verbatim
  Study study = Study::Equilibrium;
  std::optional<long> n;
  std::vector<long> n_grid;
  std::optional<Interval> bracket;

  // truncation
  double k = 12.0;
  State max_window = 2000000;
  StationarySolver solver = StationarySolver::Auto;

  // simulation
  std::uint64_t seed = 1;
  std::optional<double> t_sample;
  std::optional<double> t_burn;
  int replicas = 4;

  // concentration thresholds
  std::optional<double> delta;
  std::optional<double> delta_prime;

  // stein audit
  std::vector<double> stein_v;
  double stein_window_sds = 6.0;

  // assumption check
  std::optional<Interval> assumption_window;
  std::vector<double> eta_grid{0.05, 0.1, 0.2};

  OutputSpec output;
};

/// Parses and validates. Throws ConfigError with a message naming the field.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Builds the model described by a config model block.
ModelSpec model_from_json(const nlohmann::json& block);

}  // namespace popeq
