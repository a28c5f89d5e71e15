#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "popeq/equilibrium.hpp"
#include "popeq/lattice.hpp"
#include "popeq/model.hpp"
#include "popeq/stationary.hpp"

namespace popeq {

/// (1/2) sum_k |p(k) - q(k)| over the union of supports.
double tv_distance(const LatticeDist& p, const LatticeDist& q);
/// sup_k |P(X <= k) - Q(X <= k)|.
double kolmogorov_distance(const LatticeDist& p, const LatticeDist& q);
/// d_TV(p, p * delta_1).
double shift_tv(const LatticeDist& p);

/// |sum_i p(i) (A_n h)(i)| over the states carrying mass. `h` must cover
/// every state reachable in one jump from them.
double dynkin_residual(const ModelSpec& model, long n, const LatticeDist& dist, const WindowFn& h);

struct ConcentrationStats {
  double mean_abs_dev = 0.0;      // E|z - c|
  double second_moment_in = 0.0;  // E[(z - c)^2 ; |z - c| <= delta]
  double tail_mass = 0.0;         // P[|z - c| > delta']
  double first_moment_out = 0.0;  // E[|z - c| ; |z - c| > delta]
};

/// Moments of z = i / n under `dist`.
ConcentrationStats concentration_stats(const LatticeDist& dist, long n, double c, double delta, double delta_prime);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;  // rows that entered the fit
  bool valid() const { return points >= 2; }
};

/// Unweighted least squares of ln(y) on ln(x), skipping y < floor.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double floor = 1e-10);

struct ConvergenceRow {
  long n = 0;
  double c = 0.0;
  double v_c = 0.0;
  State centre = 0;                  // floor(n c)
  double tv_to_centred_poisson = 0.0;
  double kolmogorov = 0.0;
  double shift_tv = 0.0;
  double mean_abs_dev = 0.0;
  double second_moment_in = 0.0;
  double tail_mass = 0.0;
  double first_moment_out = 0.0;
  double second_diff_stein = 0.0;    // |E grad^2 g(W + 1)| for B = {l >= 0}
  double boundary_mass = 0.0;
  double residual_norm = 0.0;
  State window_states = 0;
};

struct StudyOptions {
  TruncationPolicy truncation;
  std::optional<Interval> bracket;
  std::optional<double> delta;        // default c / 2
  std::optional<double> delta_prime;  // default delta
  unsigned jobs = 1;
};

inline const std::vector<std::string>& fitted_metrics() {
  static const std::vector<std::string> names{"tv_to_centred_poisson", "kolmogorov", "shift_tv",
                                              "mean_abs_dev", "second_moment_in", "tail_mass"};
  return names;
}

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::map<std::string, LogLogFit> fitted;
  double delta = 0.0;
  double delta_prime = 0.0;

  static double metric(const ConvergenceRow& row, const std::string& name);
};

/// Per-row metrics of the centred stationary law against the centred
/// Poisson law with parameter n v_c.
ConvergenceRow convergence_row(const ModelSpec& model, long n, const StudyOptions& options,
                               StationaryResult* stationary_out = nullptr);

ConvergenceReport convergence_study(const ModelSpec& model, const std::vector<long>& n_grid,
                                    const StudyOptions& options = {});

}  // namespace popeq
