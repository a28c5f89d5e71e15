#pragma once

// Density-dependent Markov population processes on Z.
//
// A model is a finite family of jump-rate functions lambda_j; from state i the
// process with scale n jumps to i + j at rate n * lambda_j(i / n). The drift
// F(z) = sum_j j lambda_j(z) and the variance function sigma2(z) =
// sum_j j^2 lambda_j(z) summarize the first two infinitesimal moments of the
// density i / n.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "popeq/lattice.hpp"

namespace popeq {

enum class Family { BdiGroupBirths, AffineRates, TabulatedRates };

std::string_view family_name(Family family) noexcept;

/// Immigration, group-birth and death: lambda_{-1}(z) = d z,
/// lambda_1(z) = a + b q_1 z, lambda_j(z) = b q_j z for j >= 2.
struct BdiParams {
  double a = 1.0;
  double b = 0.0;
  double d = 1.0;
  std::map<int, double> offspring{{1, 1.0}};

  /// r-th moment of the offspring distribution.
  double moment(int r) const;
};

/// lambda_j(z) = max(0, intercept + slope * max(z, 0)).
struct AffineRate {
  double intercept = 0.0;
  double slope = 0.0;
};

using RateFn = std::function<double(double)>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Immutable jump-rate family. Cheap to copy; safe to share across threads
/// as long as any host-registered callables are themselves thread-safe.
class ModelSpec {
 public:
  static ModelSpec bdi(BdiParams params);
  static ModelSpec affine(std::map<int, AffineRate> rates);
  static ModelSpec tabulated(std::map<int, RateFn> rates);

  Family family() const { return family_; }
  const std::vector<int>& jump_support() const { return support_; }
  int min_jump() const { return support_.front(); }
  int max_jump() const { return support_.back(); }
  bool in_support(int j) const;

  double rate(int j, double z) const;
  /// Analytic d lambda_j / dz where the family provides one.
  std::optional<double> rate_derivative(int j, double z) const;
  double drift(double z) const;
  double sigma2(double z) const;
  std::optional<double> drift_derivative(double z) const;

  /// Bracket used for the equilibrium search when the caller gives none.
  Interval default_bracket() const;

  const BdiParams* bdi_params() const;
  const std::map<int, AffineRate>* affine_params() const;

 private:
  struct Impl;
  ModelSpec(Family family, std::shared_ptr<const Impl> impl, std::vector<int> support);

  Family family_;
  std::shared_ptr<const Impl> impl_;
  std::vector<int> support_;
};

/// Piecewise-linear interpolation through (z, rate) points, flat beyond the
/// ends and clipped at zero. Used for tabulated families read from config.
RateFn interpolated_rate(std::vector<double> z, std::vector<double> rate);

double eval_rate(const ModelSpec& model, int j, double z);
double eval_F(const ModelSpec& model, double z);
double eval_sigma2(const ModelSpec& model, double z);

/// (A_n h)(i) = sum_j n lambda_j(i/n) [h(i+j) - h(i)].
double generator_apply(const ModelSpec& model, long n, const WindowFn& h, State i);

/// A_n h evaluated at every state of `states` in one pass.
std::vector<double> generator_apply_range(const ModelSpec& model, long n, const WindowFn& h,
                                          IntWindow states);

struct GeneratorParts {
  double main_sigma_term = 0.0;  // (n/2) sigma2(i/n) grad g_h(i)
  double main_drift_term = 0.0;  // n F(i/n) g_h(i)
  double remainder = 0.0;        // E_n(g, i)

  double total() const { return main_sigma_term + main_drift_term + remainder; }
};

/// g_h(i) = h(i+1) - h(i), on [h.lo, h.hi - 1].
WindowFn forward_difference(const WindowFn& h);

/// Split of A_n h into the centred-Poisson-like main part and the remainder
/// built from the a_j / b_j second-difference coefficients.
GeneratorParts generator_decompose(const ModelSpec& model, long n, const WindowFn& h, State i);

/// a_j(g, i) and b_j(g, i), j >= 2, in the first-difference form
/// 2a_j = -j(j-1) grad g(i) + 2 sum_{k=1}^{j-1} k grad g(i+j-k)
/// 2b_j =  j(j-1) grad g(i) - 2 sum_{k=1}^{j-1} k grad g(i-j+k).
double a_coefficient(const WindowFn& g, State i, int j);
double b_coefficient(const WindowFn& g, State i, int j);
/// The same coefficients written with second differences:
/// 2a_j = 2 sum_{k=2}^{j} C(k,2) grad^2 g(i+j-k+1),
/// 2b_j = 2 sum_{k=2}^{j} C(k,2) grad^2 g(i-j+k).
double a_coefficient_second_diff(const WindowFn& g, State i, int j);
double b_coefficient_second_diff(const WindowFn& g, State i, int j);

struct AssumptionReport {
  bool a1_ok = false;   // unique stable root with positive mu_eta
  bool a2a_ok = false;  // linear growth envelopes with finite moment sum
  bool a2b_ok = false;  // lambda_1 bounded below, jumps generate Z
  bool a3_ok = false;   // positive rates at c, locally bounded below
  bool a4_ok = false;   // finite L1
  bool a5_ok = false;   // finite L2
  double c = 0.0;
  double f_prime_c = 0.0;
  std::map<double, double> mu_eta;
  long gcd_of_support = 1;
  double alpha_max = 1.0;
  double lambda0 = 0.0;
  double delta = 0.0;
  std::map<int, double> envelope;  // estimated c_j of the growth envelope
  double moment_sum = 0.0;         // sum |j|^{2+alpha} c_j
  double l1 = 0.0;
  double l2 = 0.0;
  std::vector<std::string> notes;
};

AssumptionReport check_assumptions(const ModelSpec& model, Interval window,
                                   const std::vector<double>& eta_grid);

}  // namespace popeq
