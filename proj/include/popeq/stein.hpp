#pragma once

// Centred ("translated") Poisson law Po(v) * delta_{-floor(v)} and the solution
// of its Stein equation
//
//   v * grad g(l+1) - l g(l) + <v> g(l) = 1_B(l) - P{B},   l >= -floor(v),
//
// with grad f(l) = f(l) - f(l-1) and <v> the fractional part of v.

#include <span>
#include <vector>

#include "popeq/lattice.hpp"

namespace popeq {

struct CentredPoisson {
  explicit CentredPoisson(double v);

  double v;
  State shift;       // floor(v)
  State support_lo;  // -floor(v)

  double frac() const { return v - static_cast<double>(shift); }
  double pmf(State l) const;
};

/// Po(v) pmf at l + floor(v), evaluated in log space; zero below -floor(v).
double centred_poisson_pmf(double v, State l);

/// Centred Poisson as a lattice distribution, cut where the upper tail drops
/// below double precision and renormalized.
LatticeDist centred_poisson_dist(double v);

struct SteinBoundReport {
  double sup_abs_g = 0.0;   // sup |g(l+1)|, l >= -floor(v)
  double sup_abs_dg = 0.0;  // sup |grad g(l+1)|, l >= -floor(v)
  double sup_abs_lg = 0.0;  // sup |l g(l)|
  double max_residual = 0.0;
};

class SteinSolution {
 public:
  SteinSolution(double v, IntegerSet set, IntWindow window, std::vector<double> g_values,
                double target_mass);

  double v() const { return v_; }
  const IntegerSet& set() const { return set_; }
  /// Residual and bounds are reported on this window; g itself is stored on
  /// [window.lo, window.hi + 1].
  IntWindow window() const { return window_; }
  /// g(l); zero at and below -floor(v). Throws WindowTooSmall above the window.
  double g(State l) const;
  /// Left side minus right side of the Stein equation at l.
  double residual(State l) const;
  /// Centred Poisson mass of the set.
  double target_mass() const { return target_mass_; }
  const SteinBoundReport& bound_report() const { return report_; }

 private:
  double v_;
  IntegerSet set_;
  IntWindow window_;
  std::vector<double> g_;  // on [window.lo, window.hi + 1]
  double target_mass_ = 0.0;
  SteinBoundReport report_;
};

inline constexpr double kSteinWindowSds = 6.0;

/// Solves the Stein equation for the indicator of `set`. `window` must cover
/// [-floor(v), floor(v) + k sqrt(v)]; `set` must lie in {l >= -floor(v)}.
SteinSolution stein_solve(double v, const IntegerSet& set, IntWindow window, double k = kSteinWindowSds);

/// Per-set bounds |E{v grad g(W+1) - W g(W) + <v> g(W)}| + P[W < -floor(v)].
std::vector<double> stein_set_bounds(const LatticeDist& dist, double v, std::span<const IntegerSet> sets);

/// Maximum of stein_set_bounds over the family.
double stein_tv_bound(const LatticeDist& dist, double v, std::span<const IntegerSet> sets);

/// All singletons plus all half-lines {l >= t} inside `window`, clipped to
/// the centred Poisson support.
std::vector<IntegerSet> default_set_family(double v, IntWindow window);

}  // namespace popeq
