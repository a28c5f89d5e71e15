#include "popeq/stein.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "popeq/error.hpp"
#include "popeq/kernels.hpp"

namespace popeq {
namespace {

State floor_state(double v) { return static_cast<State>(std::floor(v)); }

void require_positive(double v) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorKind::InvalidArgument, "Poisson parameter must be finite and > 0");
}

/// Upper end (in Po(v) coordinates) beyond which the tail is below 1e-300.
State tail_cut(double v) {
  return static_cast<State>(std::ceil(v + 40.0 * std::sqrt(v))) + 60;
}

/// Po(v) pmf on [0, last], anchored in log space at the mode and filled by
/// the ratio recursion p(m+1) = p(m) v / (m+1), then renormalized. The ratio
/// recursion keeps the table consistent with the Stein recursions below.
std::vector<double> poisson_table(double v, State last) {
  std::vector<double> p(static_cast<std::size_t>(last + 1), 0.0);
  const State mode = std::min(floor_state(v), last);
  const double log_mode = static_cast<double>(mode) * std::log(v) - v - std::lgamma(static_cast<double>(mode) + 1.0);
  p[static_cast<std::size_t>(mode)] = std::exp(log_mode);
  for (State m = mode; m < last; ++m)
    p[static_cast<std::size_t>(m + 1)] = p[static_cast<std::size_t>(m)] * v / static_cast<double>(m + 1);
  for (State m = mode; m > 0; --m)
    p[static_cast<std::size_t>(m - 1)] = p[static_cast<std::size_t>(m)] * static_cast<double>(m) / v;
  const double total = kernels::sum(p);
  for (double& x : p) x /= total;
  return p;
}

struct PoissonTable {
  explicit PoissonTable(double v_, State last_) : v(v_), last(last_), p(poisson_table(v_, last_)) {}
  double v;
  State last;
  std::vector<double> p;
};

/// f on [0, m_hi] solving v f(m+1) - m f(m) = 1_A(m) - Po(v){A}, f(0) = 0,
/// with A = set + floor(v). Forward recursion below ceil(v), backward from
/// the far tail above it; both directions contract.
std::vector<double> solve_shifted(const PoissonTable& tab, const IntegerSet& set, State m_hi, double* mass) {
  const double v = tab.v;
  const State fl = floor_state(v);
  const auto size = static_cast<std::size_t>(tab.last + 1);
  std::vector<double> w(size);
  double total = 0.0, in_set = 0.0;
  for (std::size_t m = 0; m < size; ++m) {
    const bool member = set.contains(static_cast<State>(m) - fl);
    w[m] = member ? 1.0 : 0.0;
    total += tab.p[m];
    in_set += member ? tab.p[m] : 0.0;
  }
  const double pa = in_set / total;
  for (double& x : w) x -= pa;
  if (mass) *mass = pa;

  std::vector<double> f(static_cast<std::size_t>(m_hi + 1), 0.0);
  const State switch_at = std::max<State>(1, static_cast<State>(std::ceil(v)));
  double t = 0.0;  // sum_{k<m} w_k p_k / p_{m-1}
  for (State m = 1; m < switch_at && m <= m_hi; ++m) {
    t = w[static_cast<std::size_t>(m - 1)] + (m > 1 ? t * static_cast<double>(m - 1) / v : 0.0);
    f[static_cast<std::size_t>(m)] = t / v;
  }
  double s = 0.0;  // sum_{k>=m} w_k p_k / p_{m-1}
  for (State m = tab.last; m >= switch_at; --m) {
    s = v / static_cast<double>(m) * (w[static_cast<std::size_t>(m)] + s);
    if (m <= m_hi) f[static_cast<std::size_t>(m)] = -s / v;
  }
  return f;
}

SteinSolution build_solution(const PoissonTable& tab, const IntegerSet& set, IntWindow window) {
  const State fl = floor_state(tab.v);
  if (!set.empty() && set.min() < -fl)
    throw Error(ErrorKind::InvalidArgument, "Stein set extends below -floor(v)");
  const State m_hi = std::max<State>(0, window.hi + 1 + fl);
  double mass = 0.0;
  const auto f = solve_shifted(tab, set, m_hi, &mass);
  std::vector<double> g(static_cast<std::size_t>(window.size() + 1), 0.0);
  for (State l = std::max(window.lo, -fl + 1); l <= window.hi + 1; ++l)
    g[static_cast<std::size_t>(l - window.lo)] = f[static_cast<std::size_t>(l + fl)];
  return SteinSolution(tab.v, set, window, std::move(g), mass);
}

}  // namespace

CentredPoisson::CentredPoisson(double v_) : v(v_), shift(0), support_lo(0) {
  require_positive(v);
  shift = floor_state(v);
  support_lo = -shift;
}

double CentredPoisson::pmf(State l) const { return centred_poisson_pmf(v, l); }

double centred_poisson_pmf(double v, State l) {
  require_positive(v);
  const State m = l + floor_state(v);
  if (m < 0) return 0.0;
  const double md = static_cast<double>(m);
  return std::exp(md * std::log(v) - v - std::lgamma(md + 1.0));
}

LatticeDist centred_poisson_dist(double v) {
  require_positive(v);
  auto p = poisson_table(v, tail_cut(v));
  return LatticeDist(-floor_state(v), std::move(p));
}

SteinSolution::SteinSolution(double v, IntegerSet set, IntWindow window, std::vector<double> g_values,
                             double target_mass)
    : v_(v), set_(std::move(set)), window_(window), g_(std::move(g_values)), target_mass_(target_mass) {
  if (g_.size() != static_cast<std::size_t>(window_.size() + 1))
    throw Error(ErrorKind::InvalidArgument, "Stein solution values must span the window plus one point");
  const State fl = floor_state(v_);
  const double frac = v_ - static_cast<double>(fl);
  const State bottom = -fl;

  for (State l = window_.lo; l <= window_.hi; ++l) {
    const double gl = g(l);
    report_.sup_abs_lg = std::max(report_.sup_abs_lg, std::abs(static_cast<double>(l) * gl));
    if (l < bottom) continue;
    const double gn = g(l + 1);
    report_.sup_abs_g = std::max(report_.sup_abs_g, std::abs(gn));
    report_.sup_abs_dg = std::max(report_.sup_abs_dg, std::abs(gn - gl));
    const double lhs = v_ * (gn - gl) - static_cast<double>(l) * gl + frac * gl;
    const double rhs = (set_.contains(l) ? 1.0 : 0.0) - target_mass_;
    report_.max_residual = std::max(report_.max_residual, std::abs(lhs - rhs));
  }
}

double SteinSolution::g(State l) const {
  if (l <= -floor_state(v_)) return 0.0;
  if (l < window_.lo || l > window_.hi + 1)
    throw Error(ErrorKind::WindowTooSmall, "Stein solution queried at " + std::to_string(l) + " outside its window");
  return g_[static_cast<std::size_t>(l - window_.lo)];
}

double SteinSolution::residual(State l) const {
  const State fl = floor_state(v_);
  if (l < -fl) throw Error(ErrorKind::InvalidArgument, "Stein equation only holds for l >= -floor(v)");
  const double frac = v_ - static_cast<double>(fl);
  const double gl = g(l);
  const double lhs = v_ * (g(l + 1) - gl) - static_cast<double>(l) * gl + frac * gl;
  return lhs - ((set_.contains(l) ? 1.0 : 0.0) - target_mass_);
}

SteinSolution stein_solve(double v, const IntegerSet& set, IntWindow window, double k) {
  require_positive(v);
  const State fl = floor_state(v);
  const State need_hi = fl + static_cast<State>(std::ceil(k * std::sqrt(v)));
  if (window.lo > -fl || window.hi < need_hi)
    throw Error(ErrorKind::WindowTooSmall,
                "Stein window [" + std::to_string(window.lo) + ", " + std::to_string(window.hi) +
                    "] must cover [" + std::to_string(-fl) + ", " + std::to_string(need_hi) + "]");
  const PoissonTable tab(v, std::max(tail_cut(v), window.hi + 2 + fl));
  return build_solution(tab, set, window);
}

std::vector<double> stein_set_bounds(const LatticeDist& dist, double v, std::span<const IntegerSet> sets) {
  require_positive(v);
  const State fl = floor_state(v);
  const double frac = v - static_cast<double>(fl);
  const IntWindow window{std::min(dist.lo(), -fl),
                         std::max(dist.hi(), fl + static_cast<State>(std::ceil(kSteinWindowSds * std::sqrt(v))))};
  const PoissonTable tab(v, std::max(tail_cut(v), window.hi + 2 + fl));

  double below = 0.0;
  for (State w = dist.lo(); w <= dist.hi() && w < -fl; ++w) below += dist.pmf(w);

  std::vector<double> op(dist.size());
  std::vector<double> out;
  out.reserve(sets.size());
  for (const auto& set : sets) {
    const auto sol = build_solution(tab, set, window);
    for (std::size_t k = 0; k < dist.size(); ++k) {
      const State w = dist.lo() + static_cast<State>(k);
      const double gw = sol.g(w);
      op[k] = v * (sol.g(w + 1) - gw) - static_cast<double>(w) * gw + frac * gw;
    }
    out.push_back(std::abs(kernels::dot(dist.weights(), op)) + below);
  }
  return out;
}

double stein_tv_bound(const LatticeDist& dist, double v, std::span<const IntegerSet> sets) {
  const auto bounds = stein_set_bounds(dist, v, sets);
  double best = 0.0;
  for (double b : bounds) best = std::max(best, b);
  return best;
}

std::vector<IntegerSet> default_set_family(double v, IntWindow window) {
  require_positive(v);
  const State lo = std::max(window.lo, -floor_state(v));
  std::vector<IntegerSet> family;
  for (State l = lo; l <= window.hi; ++l) family.push_back(IntegerSet::singleton(l));
  for (State t = lo + 1; t <= window.hi; ++t) family.push_back(IntegerSet::at_least(t));
  return family;
}

}  // namespace popeq
