#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace popeq {

using State = std::int64_t;

/// Closed integer interval [lo, hi].
struct IntWindow {
  State lo = 0;
  State hi = -1;

  State size() const { return hi >= lo ? hi - lo + 1 : 0; }
  bool contains(State k) const { return k >= lo && k <= hi; }
  bool covers(const IntWindow& other) const {
    return other.size() == 0 || (lo <= other.lo && hi >= other.hi);
  }
};

/// Real function on a finite integer window. Reading outside the window is
/// an error (WindowTooSmall), never a silent zero.
class WindowFn {
 public:
  WindowFn() = default;
  WindowFn(State lo, std::vector<double> values);

  static WindowFn tabulate(IntWindow window, const std::function<double(State)>& f);

  State lo() const { return lo_; }
  State hi() const { return lo_ + static_cast<State>(values_.size()) - 1; }
  IntWindow window() const { return {lo(), hi()}; }
  bool covers(State a, State b) const { return a >= lo() && b <= hi(); }

  double operator()(State k) const;
  std::span<const double> values() const { return values_; }

 private:
  State lo_ = 0;
  std::vector<double> values_;
};

/// Finitely supported probability distribution on Z: weights[k] is the mass
/// at offset + k. Construction validates and renormalizes.
class LatticeDist {
 public:
  static constexpr double kDefaultTol = 1e-9;

  LatticeDist() = default;
  LatticeDist(State offset, std::vector<double> weights, double tol = kDefaultTol);

  static LatticeDist point_mass(State at);

  State offset() const { return offset_; }
  State lo() const { return offset_; }
  State hi() const { return offset_ + static_cast<State>(weights_.size()) - 1; }
  IntWindow window() const { return {lo(), hi()}; }
  std::size_t size() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }

  double pmf(State k) const;
  double mean() const;
  double variance() const;
  /// E f(X) over the support.
  double expect(const std::function<double(State)>& f) const;
  /// Weights laid out on `window`, zero where outside the support.
  std::vector<double> dense_on(IntWindow window) const;

 private:
  State offset_ = 0;
  std::vector<double> weights_{1.0};
};

/// Translation: offset decreased by `by`, weights unchanged.
LatticeDist centre(const LatticeDist& dist, State by);

/// Union of disjoint closed intervals; `hi` may be kUnbounded for half-lines.
class IntegerSet {
 public:
  static constexpr State kUnbounded = std::numeric_limits<State>::max();

  IntegerSet() = default;

  static IntegerSet singleton(State k) { return interval(k, k); }
  static IntegerSet interval(State lo, State hi);
  static IntegerSet at_least(State lo) { return interval(lo, kUnbounded); }
  static IntegerSet from_points(std::vector<State> points);

  bool contains(State k) const;
  bool empty() const { return pieces_.empty(); }
  bool bounded() const { return pieces_.empty() || pieces_.back().hi != kUnbounded; }
  State min() const { return pieces_.front().lo; }
  /// Number of elements, or kUnbounded for infinite sets.
  State cardinality() const;
  std::span<const IntWindow> pieces() const { return pieces_; }

 private:
  std::vector<IntWindow> pieces_;
};

}  // namespace popeq
