#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "popeq/error.hpp"
#include "popeq/model.hpp"
#include "random_models.hpp"

using namespace popeq;

namespace {

ModelSpec group_births() { return ModelSpec::bdi({1.0, 0.5, 2.0, {{1, 0.5}, {2, 0.5}}}); }

double brute_generator(const ModelSpec& m, long n, const WindowFn& h, State i) {
  double acc = 0.0;
  const double z = static_cast<double>(i) / static_cast<double>(n);
  for (int j : m.jump_support()) acc += static_cast<double>(n) * m.rate(j, z) * (h(i + j) - h(i));
  return acc;
}

}  // namespace

TEST_CASE("group-birth rates, drift and variance") {
  const auto m = group_births();
  CHECK(m.family() == Family::BdiGroupBirths);
  CHECK(m.jump_support() == std::vector<int>{-1, 1, 2});
  CHECK(m.rate(1, 0.4) == doctest::Approx(1.0 + 0.5 * 0.5 * 0.4));
  CHECK(m.rate(2, 0.4) == doctest::Approx(0.5 * 0.5 * 0.4));
  CHECK(m.rate(-1, 0.4) == doctest::Approx(0.8));
  CHECK(m.rate(3, 0.4) == 0.0);
  // F(z) = a + b m1 z - d z, sigma2(z) = a + b m2 z + d z
  CHECK(m.drift(0.4) == doctest::Approx(1.0 + 0.5 * 1.5 * 0.4 - 0.8));
  CHECK(m.sigma2(0.4) == doctest::Approx(1.0 + 0.5 * 2.5 * 0.4 + 0.8));
  CHECK(*m.drift_derivative(0.4) == doctest::Approx(0.75 - 2.0));
  CHECK(m.rate(-1, -3.0) == 0.0);
  CHECK_THROWS_AS(m.rate(0, 1.0), Error);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(ModelSpec::bdi({0.0, 0.5, 2.0, {{1, 1.0}}}), Error);
  CHECK_THROWS_AS(ModelSpec::bdi({1.0, -0.1, 2.0, {{1, 1.0}}}), Error);
  CHECK_THROWS_AS(ModelSpec::bdi({1.0, 0.5, 0.0, {{1, 1.0}}}), Error);
  CHECK_THROWS_AS(ModelSpec::bdi({1.0, 0.5, 2.0, {{1, 0.4}}}), Error);
}

TEST_CASE("affine and tabulated families") {
  const auto aff = ModelSpec::affine({{1, {1.0, 0.0}}, {-2, {0.0, 3.0}}});
  CHECK(aff.jump_support() == std::vector<int>{-2, 1});
  CHECK(aff.drift(0.5) == doctest::Approx(1.0 - 2.0 * 1.5));
  CHECK(aff.sigma2(0.5) == doctest::Approx(1.0 + 4.0 * 1.5));

  const auto tab = ModelSpec::tabulated(
      {{1, interpolated_rate({0.0, 1.0}, {1.0, 1.0})}, {-1, interpolated_rate({0.0, 2.0}, {0.0, 4.0})}});
  CHECK(tab.rate(-1, 0.5) == doctest::Approx(1.0));
  CHECK(tab.rate(-1, 5.0) == doctest::Approx(4.0));
  CHECK(tab.drift(0.5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(interpolated_rate({1.0, 0.0}, {1.0, 1.0}), Error);
}

TEST_CASE("generator matches a direct sum and annihilates constants") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const auto m = testing::random_model(rng);
    const long n = 10 + static_cast<long>(rng() % 90);
    const auto h = testing::random_function(rng, {-20, 3 * n + 20});
    const State i = static_cast<State>(rng() % static_cast<std::uint64_t>(3 * n));
    CHECK(generator_apply(m, n, h, i) == doctest::Approx(brute_generator(m, n, h, i)).epsilon(1e-12));
    const auto one = WindowFn::tabulate({-20, 3 * n + 20}, [](State) { return 1.0; });
    CHECK(generator_apply(m, n, one, i) == 0.0);

    const auto range = generator_apply_range(m, n, h, {0, 2 * n});
    for (State k = 0; k <= 2 * n; ++k)
      CHECK(range[static_cast<std::size_t>(k)] == doctest::Approx(generator_apply(m, n, h, k)).epsilon(1e-12));
  }
}

TEST_CASE("generator needs the one-jump neighbourhood") {
  const auto m = group_births();
  const auto h = WindowFn::tabulate({0, 10}, [](State k) { return double(k); });
  CHECK_THROWS_AS(generator_apply(m, 10, h, 9), Error);
}

TEST_CASE("decomposition reassembles the generator") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const auto m = testing::random_model(rng);
    const long n = 1 + static_cast<long>(rng() % 100);
    const State i = static_cast<State>(rng() % static_cast<std::uint64_t>(2 * n + 1));
    const auto h = testing::random_function(rng, {i - 12, i + 12});
    const auto parts = generator_decompose(m, n, h, i);
    const double direct = generator_apply(m, n, h, i);
    const double scale = std::max({1.0, std::abs(direct), std::abs(parts.main_sigma_term),
                                   std::abs(parts.main_drift_term), std::abs(parts.remainder)});
    CHECK(std::abs(parts.total() - direct) <= 1e-10 * scale);
  }
}

TEST_CASE("coefficient forms agree for jumps up to 10") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const auto g = testing::random_function(rng, {-30, 30}, 5.0);
    const State i = static_cast<State>(rng() % 9) - 4;
    for (int j = 2; j <= 10; ++j) {
      CHECK(a_coefficient(g, i, j) == doctest::Approx(a_coefficient_second_diff(g, i, j)).epsilon(1e-12));
      CHECK(b_coefficient(g, i, j) == doctest::Approx(b_coefficient_second_diff(g, i, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("coefficients vanish for linear g") {
  const auto g = WindowFn::tabulate({-30, 30}, [](State k) { return 2.0 * double(k) - 1.0; });
  for (int j = 2; j <= 10; ++j) {
    CHECK(a_coefficient(g, 0, j) == doctest::Approx(0.0));
    CHECK(b_coefficient(g, 0, j) == doctest::Approx(0.0));
  }
}

TEST_CASE("assumption checks on the standard models") {
  const auto r = check_assumptions(group_births(), {1e-6, 5.0}, {0.05, 0.1, 0.2});
  CHECK(r.a1_ok);
  CHECK(r.a2a_ok);
  CHECK(r.a2b_ok);
  CHECK(r.a3_ok);
  CHECK(r.a4_ok);
  CHECK(r.a5_ok);
  CHECK(r.c == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(r.gcd_of_support == 1);

  const auto even = ModelSpec::affine({{2, {1.0, 0.0}}, {-2, {0.0, 1.0}}});
  const auto re = check_assumptions(even, {1e-6, 5.0}, {0.1});
  CHECK(re.gcd_of_support == 2);
  CHECK_FALSE(re.a2b_ok);
}
