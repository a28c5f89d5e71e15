#include <algorithm>
#include <cassert>
#include <cmath>

#include "popeq/kernels.hpp"

namespace popeq::kernels {
namespace {

double sum_scalar(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double sum_abs_scalar(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double dot_scalar(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double sum_abs_diff_scalar(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s;
}

double max_abs_diff_scalar(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

void axpy_scalar(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void mul_acc_scalar(std::span<const double> x, std::span<const double> d, std::span<double> y) {
  assert(x.size() == y.size() && d.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += x[i] * d[i];
}

void jump_diff_acc_scalar(std::span<const double> rate, std::span<const double> shifted,
                          std::span<const double> base, std::span<double> out) {
  assert(rate.size() == out.size() && shifted.size() == out.size() && base.size() == out.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += rate[i] * (shifted[i] - base[i]);
}

constexpr KernelTable kScalar{
    sum_scalar,         sum_abs_scalar, dot_scalar,    sum_abs_diff_scalar,
    max_abs_diff_scalar, axpy_scalar,   mul_acc_scalar, jump_diff_acc_scalar,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace popeq::kernels
