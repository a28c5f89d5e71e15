#pragma once

#include <optional>

#include "popeq/equilibrium.hpp"
#include "popeq/lattice.hpp"
#include "popeq/model.hpp"

namespace popeq {

enum class StationarySolver {
  Auto,            // direct up to kDirectSolverLimit states, uniformization beyond
  Direct,          // banded state reduction (Grassmann-Taksar-Heyman)
  Uniformization,  // power iteration on I + Q / Lambda
};

inline constexpr State kDirectSolverLimit = 200000;

struct TruncationPolicy {
  std::optional<State> center;      // default floor(n c)
  std::optional<State> half_width;  // default ceil(k sqrt(n v_c))
  double k = 12.0;
  State max_window = 2000000;
  StationarySolver solver = StationarySolver::Auto;
  double boundary_tol = 1e-6;
  bool retry_doubled = true;  // one retry at twice the half width
};

struct StationaryDiagnostics {
  double boundary_mass = 0.0;  // mass on the two outermost states at each end
  double residual_norm = 0.0;  // || pi Q ||_1 for the truncated generator
  State half_width = 0;
  StationarySolver solver_used = StationarySolver::Direct;
  int iterations = 0;          // uniformization sweeps, 0 for the direct solve
};

struct StationaryResult {
  LatticeDist dist;
  StationaryDiagnostics diagnostics;
  EquilibriumInfo equilibrium;
};

/// Exact stationary law of the scale-n process on a finite window with
/// reflecting redirection of jumps that would leave it.
StationaryResult stationary_exact(const ModelSpec& model, long n, const TruncationPolicy& policy = {},
                                  std::optional<Interval> bracket = std::nullopt);

/// Truncated generator in band storage: row s holds Q[s, s + o] for
/// o in [-lower, upper]. Exposed for tests and diagnostics.
class BandGenerator {
 public:
  BandGenerator(const ModelSpec& model, long n, IntWindow window);

  IntWindow window() const { return window_; }
  std::size_t size() const { return static_cast<std::size_t>(window_.size()); }
  int lower() const { return lower_; }
  int upper() const { return upper_; }
  /// Off-diagonal or diagonal entry; zero outside the band.
  double at(std::size_t row, std::size_t col) const;
  /// ||pi Q||_1.
  double residual_norm(std::span<const double> pi) const;

 private:
  friend std::vector<double> solve_direct(const BandGenerator& q);
  friend std::vector<double> solve_uniformization(const BandGenerator& q, double tol, int max_iter, int* iterations);

  IntWindow window_;
  int lower_ = 0;
  int upper_ = 0;
  std::size_t width_ = 0;
  std::vector<double> band_;  // row-major, width_ = lower + upper + 1
};

std::vector<double> solve_direct(const BandGenerator& q);
std::vector<double> solve_uniformization(const BandGenerator& q, double tol = 1e-15, int max_iter = 5000000,
                                         int* iterations = nullptr);

}  // namespace popeq
