#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "popeq/analysis.hpp"
#include "popeq/error.hpp"
#include "popeq/stein.hpp"
#include "random_models.hpp"

using namespace popeq;

namespace {

IntWindow solve_window(double v) {
  const auto fl = static_cast<State>(std::floor(v));
  return {-fl, fl + static_cast<State>(std::ceil(kSteinWindowSds * std::sqrt(v)))};
}

double poisson_pmf(double v, long m) { return std::exp(m * std::log(v) - v - std::lgamma(m + 1.0)); }

}  // namespace

TEST_CASE("centred Poisson is Poisson shifted by floor(v)") {
  for (double v : {0.5, 3.0, 10.7, 250.0}) {
    const CentredPoisson cp(v);
    CHECK(cp.shift == static_cast<State>(std::floor(v)));
    CHECK(cp.support_lo == -cp.shift);
    CHECK(cp.frac() == doctest::Approx(v - std::floor(v)));
    CHECK(cp.pmf(cp.support_lo - 1) == 0.0);
    for (long m = 0; m < 30; ++m)
      CHECK(cp.pmf(m - cp.shift) == doctest::Approx(poisson_pmf(v, m)).epsilon(1e-12));
    const auto d = centred_poisson_dist(v);
    CHECK(d.mean() == doctest::Approx(v - std::floor(v)).epsilon(1e-8));
    CHECK(d.variance() == doctest::Approx(v).epsilon(1e-8));
  }
  CHECK_THROWS_AS(CentredPoisson(0.0), Error);
}

TEST_CASE("solutions satisfy the Stein equation and the uniform bounds") {
  std::mt19937_64 rng(21);
  for (double v : {0.5, 1.0, 2.5, 4.0, 10.7, 100.0, 1000.0}) {
    CAPTURE(v);
    const auto window = solve_window(v);
    const auto fl = static_cast<State>(std::floor(v));
    for (int rep = 0; rep < 20; ++rep) {
      const auto set = testing::random_set(rng, {-fl, window.hi});
      const auto sol = stein_solve(v, set, window);
      for (State l = -fl; l <= window.hi; ++l) CHECK(std::abs(sol.residual(l)) <= 1e-10);
      const auto& r = sol.bound_report();
      CHECK(r.max_residual <= 1e-10);
      CHECK(r.sup_abs_g <= std::min(1.0, 1.0 / std::sqrt(v)) + 1e-12);
      CHECK(r.sup_abs_dg <= 1.0 / v + 1e-12);
      CHECK(r.sup_abs_lg <= 3.0 + 1e-12);
      for (State l = -fl - 5; l <= -fl; ++l) CHECK(sol.g(l) == 0.0);
    }
  }
}

TEST_CASE("whole support gives the zero solution") {
  const double v = 7.3;
  const auto sol = stein_solve(v, IntegerSet::at_least(-7), solve_window(v));
  CHECK(sol.target_mass() == doctest::Approx(1.0));
  for (State l = -7; l <= solve_window(v).hi; ++l) CHECK(sol.g(l) == 0.0);
}

TEST_CASE("too narrow a window is rejected") {
  CHECK_THROWS_AS(stein_solve(10.0, IntegerSet::singleton(0), {-5, 40}), Error);
  CHECK_THROWS_AS(stein_solve(10.0, IntegerSet::singleton(0), {-10, 5}), Error);
  const auto sol = stein_solve(10.0, IntegerSet::singleton(0), solve_window(10.0));
  CHECK_THROWS_AS((void)sol.residual(-11), Error);
}

TEST_CASE("set bounds equal the probability discrepancy") {
  std::mt19937_64 rng(22);
  for (double v : {2.5, 40.0}) {
    const auto fl = static_cast<State>(std::floor(v));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(static_cast<std::size_t>(2 * fl + 8));
    for (auto& x : w) x = u(rng);
    const LatticeDist dist(-fl, testing::normalised(w));
    const auto target = centred_poisson_dist(v);
    std::vector<IntegerSet> sets;
    for (int k = 0; k < 30; ++k) sets.push_back(testing::random_set(rng, {-fl, fl + 8}));
    const auto bounds = stein_set_bounds(dist, v, sets);
    for (std::size_t k = 0; k < sets.size(); ++k) {
      double pd = 0.0, pt = 0.0;
      for (State l = dist.lo(); l <= dist.hi(); ++l)
        if (sets[k].contains(l)) pd += dist.pmf(l);
      for (State l = target.lo(); l <= target.hi(); ++l)
        if (sets[k].contains(l)) pt += target.pmf(l);
      CHECK(bounds[k] == doctest::Approx(std::abs(pd - pt)).epsilon(1e-9));
    }
  }
}

TEST_CASE("family bound dominates total variation") {
  const double v = 12.4;
  const auto fl = static_cast<State>(std::floor(v));
  std::vector<double> w(60);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(-0.5 * std::pow((double(k) - 15.0) / 4.0, 2));
  const LatticeDist dist(-fl, testing::normalised(w));
  const auto target = centred_poisson_dist(v);
  const double tv = tv_distance(dist, target);

  // The optimal set {dist > target} is a finite point set.
  std::vector<State> better;
  for (State l = -fl; l <= dist.hi(); ++l)
    if (dist.pmf(l) > target.pmf(l)) better.push_back(l);
  std::vector<IntegerSet> family = default_set_family(v, dist.window());
  family.push_back(IntegerSet::from_points(better));
  CHECK(stein_tv_bound(dist, v, family) == doctest::Approx(tv).epsilon(1e-9));

  const auto singles = default_set_family(v, {-fl, dist.hi()});
  const auto per = stein_set_bounds(dist, v, singles);
  double half_sum = 0.0;
  for (std::size_t k = 0; k < singles.size(); ++k)
    if (singles[k].bounded()) half_sum += 0.5 * per[k];
  double tail = 0.0;
  for (State l = dist.hi() + 1; l <= target.hi(); ++l) tail += target.pmf(l);
  CHECK(half_sum >= tv - tail - 1e-12);
}
