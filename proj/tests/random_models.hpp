#pragma once

#include <map>
#include <random>

#include "popeq/lattice.hpp"
#include "popeq/model.hpp"

namespace popeq::testing {

// Jumps reach at most 10 in either direction.
inline ModelSpec random_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < 0.5) {
    BdiParams p;
    p.a = 0.2 + 2.0 * u(rng);
    p.b = 1.5 * u(rng);
    p.d = 0.2 + 3.0 * u(rng);
    p.offspring.clear();
    const int top = 1 + static_cast<int>(u(rng) * 10.0);
    double total = 0.0;
    for (int j = 1; j <= top; ++j) {
      if (j > 1 && u(rng) < 0.4) continue;
      p.offspring[j] = 0.05 + u(rng);
      total += p.offspring[j];
    }
    for (auto& [j, q] : p.offspring) q /= total;
    return ModelSpec::bdi(p);
  }
  std::map<int, AffineRate> rates;
  rates[1] = {0.1 + u(rng), u(rng)};
  rates[-1] = {0.0, 0.5 + 2.0 * u(rng)};
  const int extra = static_cast<int>(u(rng) * 4.0);
  for (int k = 0; k < extra; ++k) {
    int j = static_cast<int>(u(rng) * 21.0) - 10;
    if (j == 0) j = 2;
    rates[j] = {0.5 * u(rng), 0.5 * u(rng)};
  }
  return ModelSpec::affine(rates);
}

inline WindowFn random_function(std::mt19937_64& rng, IntWindow window, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return WindowFn::tabulate(window, [&](State) { return u(rng); });
}

// Mixes finite point sets, intervals and upper half-lines inside `span`.
inline IntegerSet random_set(std::mt19937_64& rng, IntWindow span) {
  std::uniform_int_distribution<State> pick(span.lo, span.hi);
  switch (rng() % 3) {
    case 0: {
      std::vector<State> pts(1 + rng() % 6);
      for (auto& p : pts) p = pick(rng);
      return IntegerSet::from_points(pts);
    }
    case 1: {
      State a = pick(rng), b = pick(rng);
      if (a > b) std::swap(a, b);
      return IntegerSet::interval(a, b);
    }
    default:
      return IntegerSet::at_least(pick(rng));
  }
}

inline std::vector<double> normalised(std::vector<double> w) {
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

}  // namespace popeq::testing
