#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "popeq/analysis.hpp"
#include "popeq/error.hpp"
#include "popeq/simulate.hpp"
#include "popeq/stationary.hpp"

using namespace popeq;

namespace {

ModelSpec group_births() { return ModelSpec::bdi({1.0, 0.5, 2.0, {{1, 0.5}, {2, 0.5}}}); }

SimConfig short_run(long n, std::uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.t_sample = 200.0;
  cfg.replicas = 3;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("replica seeds are distinct and stable") {
  CHECK(replica_seed(1, 0) != replica_seed(1, 1));
  CHECK(replica_seed(1, 0) != replica_seed(2, 0));
  CHECK(replica_seed(7, 3) == replica_seed(7, 3));
}

TEST_CASE("same seed gives bit-identical output regardless of jobs") {
  auto cfg = short_run(40, 99);
  const auto a = ssa_run(group_births(), cfg);
  cfg.jobs = 3;
  const auto b = ssa_run(group_births(), cfg);
  REQUIRE(a.dist.lo() == b.dist.lo());
  REQUIRE(a.dist.size() == b.dist.size());
  for (std::size_t k = 0; k < a.dist.size(); ++k) CHECK(a.dist.weights()[k] == b.dist.weights()[k]);
  CHECK(a.total_jumps == b.total_jumps);

  const auto c = ssa_run(group_births(), short_run(40, 100));
  CHECK(c.total_jumps != a.total_jumps);
}

TEST_CASE("defaults follow the equilibrium scales") {
  SimConfig cfg;
  cfg.n = 20;
  cfg.replicas = 1;
  cfg.t_sample = 10.0;
  const auto est = ssa_run(group_births(), cfg);
  CHECK(est.t_burn == doctest::Approx(5.0 / 1.25));
  CHECK(est.reference_density == doctest::Approx(0.8));
  CHECK(est.t_sample == 10.0);
}

TEST_CASE("holding times are exponential with the total rate") {
  const auto m = group_births();
  const long n = 30;
  auto cfg = short_run(n, 5);
  cfg.t_sample = 2000.0;
  const auto est = ssa_run(m, cfg);
  int checked = 0;
  for (std::size_t k = 0; k < est.holding_count.size(); ++k) {
    if (est.holding_count[k] < 2000) continue;
    const double z = static_cast<double>(est.dist.lo() + static_cast<State>(k)) / n;
    double total = 0.0;
    for (int j : m.jump_support()) total += n * m.rate(j, z);
    const double mean = est.holding_time[k] / static_cast<double>(est.holding_count[k]);
    const double se = (1.0 / total) / std::sqrt(static_cast<double>(est.holding_count[k]));
    CHECK(std::abs(mean - 1.0 / total) <= 5.0 * se);
    ++checked;
  }
  CHECK(checked >= 5);
}

TEST_CASE("occupation approaches the exact law") {
  const auto m = group_births();
  auto cfg = short_run(30, 8);
  cfg.t_sample = 5000.0;
  const auto est = ssa_run(m, cfg);
  const auto exact = stationary_exact(m, 30);
  CHECK(tv_distance(est.dist, exact.dist) < 0.05);
  CHECK(est.max_excursion > 0.0);
}

TEST_CASE("absorbing start raises StuckState") {
  const auto frozen = ModelSpec::affine({{1, {0.0, 1.0}}, {-1, {0.0, 1.0}}});
  SimConfig cfg;
  cfg.n = 10;
  cfg.initial_state = 0;
  cfg.t_burn = 0.0;
  cfg.t_sample = 1.0;
  try {
    ssa_run(frozen, cfg);
    FAIL("expected StuckState");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StuckState);
  }
}

TEST_CASE("invalid configurations") {
  auto cfg = short_run(10, 1);
  cfg.replicas = 0;
  CHECK_THROWS_AS(ssa_run(group_births(), cfg), Error);
  cfg = short_run(0, 1);
  CHECK_THROWS_AS(ssa_run(group_births(), cfg), Error);
  cfg = short_run(10, 1);
  cfg.t_sample = -1.0;
  CHECK_THROWS_AS(ssa_run(group_births(), cfg), Error);
}
