#pragma once

#include <map>
#include <optional>

#include "popeq/model.hpp"

namespace popeq {

/// Deterministic equilibrium of dz/dt = F(z) and the variance parameter of the
/// approximating translated Poisson law.
struct EquilibriumInfo {
  double c = 0.0;
  double f_prime_c = 0.0;
  double sigma2_c = 0.0;
  double v_c = 0.0;  // sigma2_c / (-2 f_prime_c)
  double solver_residual = 0.0;
};

/// Scan + bisection + Newton polish. Throws NoSignChange, MultipleRoots or
/// UnstableEquilibrium.
EquilibriumInfo find_equilibrium(const ModelSpec& model, std::optional<Interval> bracket = std::nullopt);

/// Closed forms for the immigration / group-birth / death family:
/// c = a / (d - b m1), v_c = a (2d + b (m2 - m1)) / (2 (d - b m1)^2).
EquilibriumInfo closed_form_bdi(double a, double b, double d, const std::map<int, double>& offspring);

}  // namespace popeq
