#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "popeq/lattice.hpp"
#include "popeq/model.hpp"

namespace popeq {

struct SimConfig {
  long n = 100;
  std::optional<double> t_burn;         // default 5 / |F'(c)|
  std::optional<double> t_sample;       // default 1e4 * v_c
  int replicas = 4;
  std::uint64_t seed = 1;
  std::optional<State> initial_state;   // default floor(n c)
  unsigned jobs = 1;
  std::optional<Interval> bracket;
};

struct OccupationEstimate {
  LatticeDist dist;             // time-weighted occupation, pooled over replicas
  long long total_jumps = 0;    // jumps inside the sampling windows
  double max_excursion = 0.0;   // max |Z/n - c| while sampling
  double reference_density = 0.0;
  double t_burn = 0.0;
  double t_sample = 0.0;
  // Holding periods that began and ended inside the sampling window, per
  // state of dist.window(): count and summed duration.
  std::vector<long long> holding_count;
  std::vector<double> holding_time;
};

/// Seed of replica r: splitmix64(seed ^ r).
std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) noexcept;

/// Gillespie direct-method simulation with occupation-time estimation.
/// Throws StuckState when the total rate vanishes and RateOverflow when it is
/// not finite.
OccupationEstimate ssa_run(const ModelSpec& model, const SimConfig& cfg);

}  // namespace popeq
