#pragma once

// Data-parallel inner loops shared by the solvers and the distance metrics.
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The active variant is chosen once at startup from the CPU feature
// bits; POPEQ_ISA=scalar in the environment pins the reference path.

#include <span>
#include <string_view>

namespace popeq::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;
Isa active_isa() noexcept;
/// Switch the process-wide variant. Throws InvalidArgument if unsupported.
void force_isa(Isa isa);

struct KernelTable {
  double (*sum)(std::span<const double> x);
  double (*sum_abs)(std::span<const double> x);
  double (*dot)(std::span<const double> x, std::span<const double> y);
  double (*sum_abs_diff)(std::span<const double> x, std::span<const double> y);
  double (*max_abs_diff)(std::span<const double> x, std::span<const double> y);
  // y += alpha * x
  void (*axpy)(double alpha, std::span<const double> x, std::span<double> y);
  // y += x * d (elementwise)
  void (*mul_acc)(std::span<const double> x, std::span<const double> d, std::span<double> y);
  // out += rate * (shifted - base)
  void (*jump_diff_acc)(std::span<const double> rate, std::span<const double> shifted,
                        std::span<const double> base, std::span<double> out);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table() noexcept;
const KernelTable& active() noexcept;

inline double sum(std::span<const double> x) { return active().sum(x); }
inline double sum_abs(std::span<const double> x) { return active().sum_abs(x); }
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x, y);
}
inline double sum_abs_diff(std::span<const double> x, std::span<const double> y) {
  return active().sum_abs_diff(x, y);
}
inline double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  return active().max_abs_diff(x, y);
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x, y);
}
inline void mul_acc(std::span<const double> x, std::span<const double> d, std::span<double> y) {
  active().mul_acc(x, d, y);
}
inline void jump_diff_acc(std::span<const double> rate, std::span<const double> shifted,
                          std::span<const double> base, std::span<double> out) {
  active().jump_diff_acc(rate, shifted, base, out);
}

}  // namespace popeq::kernels
