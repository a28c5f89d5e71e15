// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "popeq/analysis.hpp"
#include "popeq/equilibrium.hpp"
#include "popeq/error.hpp"
#include "popeq/parallel.hpp"
#include "popeq/simulate.hpp"
#include "popeq/stationary.hpp"
#include "popeq/stein.hpp"
#include "random_models.hpp"

using namespace popeq;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= budget_s;
  const bool ok = v.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s %d %s: %s; %.2fs of %.0fs%s\n", ok ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs,
              budget_s, in_time ? "" : " (over budget)");
  std::fflush(stdout);
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

double poisson_pmf(double mean, State k) {
  if (k < 0) return 0.0;
  return std::exp(static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0));
}

ModelSpec poisson_model() { return ModelSpec::bdi({1.0, 0.0, 2.0, {{1, 1.0}}}); }
ModelSpec group_model() { return ModelSpec::bdi({1.0, 0.5, 2.0, {{1, 0.5}, {2, 0.5}}}); }

bool in_range(double x, double lo, double hi) { return x >= lo && x <= hi; }

}  // namespace

int main() {
  criterion(1, "exactness for immigration-death", 10.0, [] {
    double worst_pmf = 0.0, worst_excess = -1.0;
    for (long n : {50L, 100L, 200L, 400L}) {
      const auto res = stationary_exact(poisson_model(), n);
      const double mean = n / 2.0;
      for (State k = std::max<State>(0, res.dist.lo() - 5); k <= res.dist.hi() + 5; ++k)
        worst_pmf = std::max(worst_pmf, std::abs(res.dist.pmf(k) - poisson_pmf(mean, k)));
      const double v = n * res.equilibrium.v_c;
      const auto c_state = static_cast<State>(std::floor(n * res.equilibrium.c));
      const double tv = tv_distance(centre(res.dist, c_state), centred_poisson_dist(v));
      worst_excess = std::max(worst_excess, tv - (1e-8 + res.diagnostics.boundary_mass));
    }
    return Verdict{worst_pmf <= 1e-10 && worst_excess <= 0.0,
                   "max pmf error " + num(worst_pmf) + ", max tv minus allowance " + num(worst_excess)};
  });

  ConvergenceReport report;
  criterion(2, "main rate of tv_to_centred_poisson", 60.0, [&] {
    report = convergence_study(group_model(), {50, 100, 200, 400, 800});
    const auto& fit = report.fitted.at("tv_to_centred_poisson");
    return Verdict{in_range(fit.slope, -0.65, -0.35) && fit.r2 >= 0.95,
                   "slope " + num(fit.slope) + ", r2 " + num(fit.r2)};
  });

  criterion(3, "shift smoothness", 60.0, [&] {
    const auto& fit = report.fitted.at("shift_tv");
    return Verdict{in_range(fit.slope, -0.65, -0.35), "slope " + num(fit.slope)};
  });

  criterion(4, "concentration", 60.0, [&] {
    const double mad = report.fitted.at("mean_abs_dev").slope;
    const double smi = report.fitted.at("second_moment_in").slope;
    const auto& tail = report.fitted.at("tail_mass");
    bool tail_negligible = true;
    for (const auto& row : report.rows) tail_negligible = tail_negligible && row.tail_mass < 1e-12;
    const bool tail_ok = tail_negligible || (tail.valid() && tail.slope <= -0.8);
    return Verdict{in_range(mad, -0.65, -0.35) && in_range(smi, -1.2, -0.8) && tail_ok,
                   "mean_abs_dev slope " + num(mad) + ", second_moment_in slope " + num(smi) + ", tail " +
                       (tail_negligible ? std::string("below 1e-12") : "slope " + num(tail.slope))};
  });

  criterion(5, "Stein solution residual and bounds", 10.0, [] {
    std::mt19937_64 rng(2024);
    double res = 0.0, g_excess = -1.0, dg_excess = -1.0, lg = 0.0;
    bool zero_below = true;
    for (double v : {0.5, 1.0, 2.5, 4.0, 10.7, 100.0, 1000.0}) {
      const auto fl = static_cast<State>(std::floor(v));
      const IntWindow window{-fl, fl + static_cast<State>(std::ceil(kSteinWindowSds * std::sqrt(v)))};
      for (int rep = 0; rep < 50; ++rep) {
        const auto sol = stein_solve(v, testing::random_set(rng, window), window);
        for (State l = -fl; l <= window.hi; ++l) res = std::max(res, std::abs(sol.residual(l)));
        const auto& r = sol.bound_report();
        g_excess = std::max(g_excess, r.sup_abs_g - std::min(1.0, 1.0 / std::sqrt(v)));
        dg_excess = std::max(dg_excess, r.sup_abs_dg - 1.0 / v);
        lg = std::max(lg, r.sup_abs_lg);
        for (State l = -fl - 3; l <= -fl; ++l) zero_below = zero_below && sol.g(l) == 0.0;
      }
    }
    return Verdict{res <= 1e-10 && g_excess <= 1e-12 && dg_excess <= 1e-12 && lg <= 3.0 + 1e-12 && zero_below,
                   "max residual " + num(res) + ", sup|g| excess " + num(g_excess) + ", sup|dg| excess " +
                       num(dg_excess) + ", sup|l g| " + num(lg)};
  });

  criterion(6, "generator decomposition identity", 5.0, [] {
    std::mt19937_64 rng(77);
    double worst = 0.0, coeff = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
      const auto m = testing::random_model(rng);
      const long n = 1 + static_cast<long>(rng() % 100);
      const State i = static_cast<State>(rng() % static_cast<std::uint64_t>(2 * n + 1));
      const auto h = testing::random_function(rng, {i - 12, i + 12});
      const auto parts = generator_decompose(m, n, h, i);
      const double direct = generator_apply(m, n, h, i);
      worst = std::max(worst, std::abs(parts.total() - direct) / std::max(1.0, std::abs(direct)));
      const auto g = forward_difference(h);
      for (int j = 2; j <= 10; ++j) {
        const State at = i;
        if (!g.covers(at - j, at + j)) continue;
        coeff = std::max(coeff, std::abs(a_coefficient(g, at, j) - a_coefficient_second_diff(g, at, j)));
        coeff = std::max(coeff, std::abs(b_coefficient(g, at, j) - b_coefficient_second_diff(g, at, j)));
      }
    }
    return Verdict{worst <= 1e-10 && coeff <= 1e-10,
                   "max relative gap " + num(worst) + ", max coefficient gap " + num(coeff)};
  });

  criterion(7, "Dynkin identity for the exact law", 5.0, [] {
    const long n = 200;
    const auto res = stationary_exact(group_model(), n);
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const auto h = testing::random_function(rng, {res.dist.lo() - 1, res.dist.hi() + 2});
      worst = std::max(worst, dynkin_residual(group_model(), n, res.dist, h));
    }
    return Verdict{worst <= 1e-7, "max residual " + num(worst)};
  });

  criterion(8, "simulation cross-check", 120.0, [] {
    double worst_tv = 0.0;
    bool identical = true;
    for (const auto& m : {poisson_model(), group_model()}) {
      SimConfig cfg;
      cfg.n = 100;
      cfg.seed = 20240601;
      cfg.jobs = default_jobs();
      const auto a = ssa_run(m, cfg);
      const auto b = ssa_run(m, cfg);
      const auto exact = stationary_exact(m, cfg.n);
      worst_tv = std::max(worst_tv, tv_distance(a.dist, exact.dist));
      identical = identical && a.dist.lo() == b.dist.lo() && a.dist.size() == b.dist.size() &&
                  a.total_jumps == b.total_jumps;
      for (std::size_t k = 0; identical && k < a.dist.size(); ++k)
        identical = a.dist.weights()[k] == b.dist.weights()[k];
    }
    return Verdict{worst_tv <= 0.05 && identical,
                   "max tv " + num(worst_tv) + (identical ? ", reruns identical" : ", reruns differ")};
  });

  return failures == 0 ? 0 : 1;
}
