#include "popeq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "popeq/error.hpp"
#include "popeq/kernels.hpp"
#include "popeq/parallel.hpp"
#include "popeq/stein.hpp"

namespace popeq {
namespace {

IntWindow union_window(const LatticeDist& p, const LatticeDist& q) {
  return {std::min(p.lo(), q.lo()), std::max(p.hi(), q.hi())};
}

}  // namespace

double tv_distance(const LatticeDist& p, const LatticeDist& q) {
  const IntWindow w = union_window(p, q);
  const auto a = p.dense_on(w);
  const auto b = q.dense_on(w);
  return std::min(1.0, 0.5 * kernels::sum_abs_diff(a, b));
}

double kolmogorov_distance(const LatticeDist& p, const LatticeDist& q) {
  const IntWindow w = union_window(p, q);
  auto a = p.dense_on(w);
  auto b = q.dense_on(w);
  for (std::size_t k = 1; k < a.size(); ++k) {
    a[k] += a[k - 1];
    b[k] += b[k - 1];
  }
  return std::min(1.0, kernels::max_abs_diff(a, b));
}

double shift_tv(const LatticeDist& p) {
  const IntWindow w{p.lo(), p.hi() + 1};
  auto base = p.dense_on(w);
  std::vector<double> moved(base.size(), 0.0);
  std::copy(base.begin(), base.end() - 1, moved.begin() + 1);
  return std::min(1.0, 0.5 * kernels::sum_abs_diff(base, moved));
}

double dynkin_residual(const ModelSpec& model, long n, const LatticeDist& dist, const WindowFn& h) {
  const auto w = dist.weights();
  std::size_t first = 0, last = w.size();
  while (first < w.size() && w[first] == 0.0) ++first;
  while (last > first && w[last - 1] == 0.0) --last;
  if (first == last) return 0.0;
  const IntWindow states{dist.lo() + static_cast<State>(first), dist.lo() + static_cast<State>(last) - 1};
  const auto values = generator_apply_range(model, n, h, states);
  return std::abs(kernels::dot(w.subspan(first, last - first), values));
}

ConcentrationStats concentration_stats(const LatticeDist& dist, long n, double c, double delta, double delta_prime) {
  if (!(delta_prime > 0.0) || delta_prime > delta)
    throw Error(ErrorKind::InvalidArgument, "need 0 < delta' <= delta");
  ConcentrationStats s;
  const auto w = dist.weights();
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double z = static_cast<double>(dist.lo() + static_cast<State>(k)) / static_cast<double>(n);
    const double dev = std::abs(z - c);
    s.mean_abs_dev += w[k] * dev;
    if (dev <= delta)
      s.second_moment_in += w[k] * dev * dev;
    else
      s.first_moment_out += w[k] * dev;
    if (dev > delta_prime) s.tail_mass += w[k];
  }
  return s;
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double floor) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
    if (!(y[k] >= floor) || !(x[k] > 0.0)) continue;
    lx.push_back(std::log(x[k]));
    ly.push_back(std::log(y[k]));
  }
  LogLogFit fit;
  fit.points = static_cast<int>(lx.size());
  if (fit.points < 2) {
    fit.slope = fit.intercept = fit.r2 = std::nan("");
    return fit;
  }
  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
    syy += (ly[k] - my) * (ly[k] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

double ConvergenceReport::metric(const ConvergenceRow& row, const std::string& name) {
  if (name == "tv_to_centred_poisson") return row.tv_to_centred_poisson;
  if (name == "kolmogorov") return row.kolmogorov;
  if (name == "shift_tv") return row.shift_tv;
  if (name == "mean_abs_dev") return row.mean_abs_dev;
  if (name == "second_moment_in") return row.second_moment_in;
  if (name == "tail_mass") return row.tail_mass;
  if (name == "first_moment_out") return row.first_moment_out;
  if (name == "second_diff_stein") return row.second_diff_stein;
  throw Error(ErrorKind::InvalidArgument, "unknown metric " + name);
}

ConvergenceRow convergence_row(const ModelSpec& model, long n, const StudyOptions& options,
                               StationaryResult* stationary_out) {
  StationaryResult st = stationary_exact(model, n, options.truncation, options.bracket);
  const double nn = static_cast<double>(n);
  ConvergenceRow row;
  row.n = n;
  row.c = st.equilibrium.c;
  row.v_c = st.equilibrium.v_c;
  row.centre = static_cast<State>(std::floor(nn * row.c));
  row.boundary_mass = st.diagnostics.boundary_mass;
  row.residual_norm = st.diagnostics.residual_norm;
  row.window_states = static_cast<State>(st.dist.size());

  const LatticeDist centred = centre(st.dist, row.centre);
  const double v = nn * row.v_c;
  const LatticeDist target = centred_poisson_dist(v);
  row.tv_to_centred_poisson = tv_distance(centred, target);
  row.kolmogorov = kolmogorov_distance(centred, target);
  row.shift_tv = shift_tv(st.dist);

  const double delta = options.delta.value_or(row.c / 2.0);
  const double delta_prime = options.delta_prime.value_or(delta);
  const auto conc = concentration_stats(st.dist, n, row.c, delta, delta_prime);
  row.mean_abs_dev = conc.mean_abs_dev;
  row.second_moment_in = conc.second_moment_in;
  row.tail_mass = conc.tail_mass;
  row.first_moment_out = conc.first_moment_out;

  const State fl = static_cast<State>(std::floor(v));
  const IntWindow gw{std::min(centred.lo() - 1, -fl),
                     std::max(centred.hi() + 1, fl + static_cast<State>(std::ceil(kSteinWindowSds * std::sqrt(v))))};
  const SteinSolution sol = stein_solve(v, IntegerSet::at_least(0), gw);
  std::vector<double> d2(centred.size());
  for (std::size_t k = 0; k < centred.size(); ++k) {
    const State w = centred.lo() + static_cast<State>(k);
    d2[k] = sol.g(w + 1) - 2.0 * sol.g(w) + sol.g(w - 1);
  }
  row.second_diff_stein = std::abs(kernels::dot(centred.weights(), d2));

  if (stationary_out) *stationary_out = std::move(st);
  return row;
}

ConvergenceReport convergence_study(const ModelSpec& model, const std::vector<long>& n_grid,
                                    const StudyOptions& options) {
  if (n_grid.size() < 4) throw Error(ErrorKind::InvalidArgument, "convergence study needs at least 4 values of n");
  std::vector<long> grid = n_grid;
  std::sort(grid.begin(), grid.end());
  if (std::adjacent_find(grid.begin(), grid.end()) != grid.end() || grid.front() <= 0)
    throw Error(ErrorKind::InvalidArgument, "n grid must hold distinct positive values");

  ConvergenceReport report;
  report.rows.resize(grid.size());
  parallel_for(grid.size(), options.jobs,
               [&](std::size_t k) { report.rows[k] = convergence_row(model, grid[k], options); });

  report.delta = options.delta.value_or(report.rows.front().c / 2.0);
  report.delta_prime = options.delta_prime.value_or(report.delta);
  std::vector<double> x;
  for (const auto& row : report.rows) x.push_back(static_cast<double>(row.n));
  for (const auto& name : fitted_metrics()) {
    std::vector<double> y;
    for (const auto& row : report.rows) y.push_back(ConvergenceReport::metric(row, name));
    report.fitted[name] = fit_loglog(x, y);
  }
  return report;
}

}  // namespace popeq
