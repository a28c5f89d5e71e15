#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "popeq/model.hpp"

namespace popeq {
namespace {

constexpr int kGridPoints = 2001;
constexpr int kLocalPoints = 201;

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (count - 1);
  return out;
}

double bisect_root(const ModelSpec& model, double lo, double hi) {
  double flo = model.drift(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = model.drift(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double fd_step(double c) { return 1e-5 * std::max(1.0, std::abs(c)); }

double rate_slope(const ModelSpec& model, int j, double z, double c) {
  if (auto d = model.rate_derivative(j, z)) return *d;
  const double h = fd_step(c);
  return (model.rate(j, z + h) - model.rate(j, z - h)) / (2.0 * h);
}

double rate_curvature(const ModelSpec& model, int j, double z, double c) {
  const double h = fd_step(c);
  return (model.rate(j, z + h) - 2.0 * model.rate(j, z) + model.rate(j, z - h)) / (h * h);
}

}  // namespace

AssumptionReport check_assumptions(const ModelSpec& model, Interval window,
                                   const std::vector<double>& eta_grid) {
  AssumptionReport r;
  const auto grid = linspace(window.lo, window.hi, kGridPoints);
  std::vector<double> f(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) f[k] = model.drift(grid[k]);

  // A1: count sign changes of F on the grid, skipping exact zeros.
  int changes = 0;
  std::size_t last_nonzero = grid.size();
  std::size_t bracket_lo = 0, bracket_hi = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (f[k] == 0.0) continue;
    if (last_nonzero != grid.size() && (f[k] < 0.0) != (f[last_nonzero] < 0.0)) {
      ++changes;
      bracket_lo = last_nonzero;
      bracket_hi = k;
    }
    last_nonzero = k;
  }
  bool root_ok = false;
  if (changes == 0) {
    r.notes.push_back("F has no sign change on the window");
    r.c = 0.5 * (window.lo + window.hi);
  } else if (changes > 1) {
    r.notes.push_back("F changes sign " + std::to_string(changes) + " times on the window");
    r.c = bisect_root(model, grid[bracket_lo], grid[bracket_hi]);
  } else {
    r.c = bisect_root(model, grid[bracket_lo], grid[bracket_hi]);
    root_ok = true;
  }
  if (auto d = model.drift_derivative(r.c)) {
    r.f_prime_c = *d;
  } else {
    const double h = fd_step(r.c);
    r.f_prime_c = (model.drift(r.c + h) - model.drift(r.c - h)) / (2.0 * h);
  }
  bool mu_ok = true;
  for (double eta : eta_grid) {
    double mu = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (std::abs(grid[k] - r.c) >= eta) mu = std::min(mu, std::abs(f[k]));
    if (std::isinf(mu)) {
      r.notes.push_back("no grid point at distance >= " + std::to_string(eta) + " from c");
      continue;
    }
    r.mu_eta[eta] = mu;
    mu_ok = mu_ok && mu > 0.0;
  }
  r.a1_ok = root_ok && r.f_prime_c < 0.0 && mu_ok;
  if (root_ok && !(r.f_prime_c < 0.0)) r.notes.push_back("F'(c) >= 0: equilibrium is not attracting");

  // A2(a): with finite support the envelope constants are finite whenever the
  // rates are; alpha is then 1.
  long gcd = 0;
  for (int j : model.jump_support()) gcd = std::gcd(gcd, static_cast<long>(std::abs(j)));
  r.gcd_of_support = gcd;
  r.alpha_max = 1.0;
  r.moment_sum = 0.0;
  bool finite = true;
  for (int j : model.jump_support()) {
    double cj = 0.0;
    for (double z : grid) cj = std::max(cj, model.rate(j, z) / (1.0 + std::abs(z - r.c)));
    r.envelope[j] = cj;
    r.moment_sum += std::pow(std::abs(static_cast<double>(j)), 2.0 + r.alpha_max) * cj;
    finite = finite && std::isfinite(cj);
  }
  r.a2a_ok = finite && std::isfinite(r.moment_sum);

  // A2(b): lambda_1 bounded below on the window and a margin of half its width.
  const double pad = 0.5 * (window.hi - window.lo);
  double inf_l1 = std::numeric_limits<double>::infinity();
  for (double z : linspace(window.lo - pad, window.hi + pad, kGridPoints))
    inf_l1 = std::min(inf_l1, model.rate(1, z));
  r.lambda0 = 0.5 * inf_l1;
  r.a2b_ok = inf_l1 > 0.0 && gcd == 1;
  if (gcd != 1)
    r.notes.push_back("jump sizes share the factor " + std::to_string(gcd) +
                      "; total-variation approximation is not meaningful");
  else if (!(inf_l1 > 0.0))
    r.notes.push_back("lambda_1 is not bounded away from zero");

  // A3-A5 on |z - c| <= delta.
  r.delta = std::min(1.0, std::max(std::abs(r.c) / 2.0, 1e-3));
  const auto local = linspace(r.c - r.delta, r.c + r.delta, kLocalPoints);
  bool a3 = true;
  double l1 = 0.0, l2 = 0.0;
  for (int j : model.jump_support()) {
    const double at_c = model.rate(j, r.c);
    if (!(at_c > 0.0)) {
      a3 = false;
      r.notes.push_back("lambda_" + std::to_string(j) + "(c) is not positive");
      continue;
    }
    double inf_local = std::numeric_limits<double>::infinity();
    for (double z : local) {
      inf_local = std::min(inf_local, model.rate(j, z));
      l1 = std::max(l1, std::abs(rate_slope(model, j, z, r.c)) / at_c);
      l2 = std::max(l2, std::abs(rate_curvature(model, j, z, r.c)) / (std::abs(j) * at_c));
    }
    a3 = a3 && inf_local > 0.0;
  }
  r.a3_ok = a3;
  r.l1 = l1;
  r.l2 = l2;
  r.a4_ok = a3 && std::isfinite(l1);
  r.a5_ok = a3 && std::isfinite(l2);
  return r;
}

}  // namespace popeq
