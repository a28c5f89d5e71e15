// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <cassert>
#include <cmath>

#include "popeq/kernels.hpp"

namespace popeq::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, swapped));
}

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

double sum_avx2(std::span<const double> x) {
  const std::size_t n = x.size();
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x.data() + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x.data() + i + 4));
  }
  for (; i + 4 <= n; i += 4) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x.data() + i));
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double sum_abs_avx2(std::span<const double> x) {
  const std::size_t n = x.size();
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, abs_pd(_mm256_loadu_pd(x.data() + i)));
    a1 = _mm256_add_pd(a1, abs_pd(_mm256_loadu_pd(x.data() + i + 4)));
  }
  for (; i + 4 <= n; i += 4) a0 = _mm256_add_pd(a0, abs_pd(_mm256_loadu_pd(x.data() + i)));
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += std::abs(x[i]);
  return s;
}

double dot_avx2(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i + 4), _mm256_loadu_pd(y.data() + i + 4), a1);
  }
  for (; i + 4 <= n; i += 4)
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i), a0);
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_abs_diff_avx2(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(x.data() + i),
                                                 _mm256_loadu_pd(y.data() + i))));
    a1 = _mm256_add_pd(a1, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(x.data() + i + 4),
                                                 _mm256_loadu_pd(y.data() + i + 4))));
  }
  for (; i + 4 <= n; i += 4)
    a0 = _mm256_add_pd(a0, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(x.data() + i),
                                                 _mm256_loadu_pd(y.data() + i))));
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += std::abs(x[i] - y[i]);
  return s;
}

double max_abs_diff_avx2(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    m = _mm256_max_pd(m, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(x.data() + i),
                                               _mm256_loadu_pd(y.data() + i))));
  double r = hmax(m);
  for (; i < n; ++i) r = std::max(r, std::abs(x[i] - y[i]));
  return r;
}

void axpy_avx2(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(a, _mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i));
    _mm256_storeu_pd(y.data() + i, r);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul_acc_avx2(std::span<const double> x, std::span<const double> d, std::span<double> y) {
  assert(x.size() == y.size() && d.size() == y.size());
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(d.data() + i),
                                _mm256_loadu_pd(y.data() + i));
    _mm256_storeu_pd(y.data() + i, r);
  }
  for (; i < n; ++i) y[i] += x[i] * d[i];
}

void jump_diff_acc_avx2(std::span<const double> rate, std::span<const double> shifted,
                        std::span<const double> base, std::span<double> out) {
  assert(rate.size() == out.size() && shifted.size() == out.size() && base.size() == out.size());
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(shifted.data() + i), _mm256_loadu_pd(base.data() + i));
    __m256d r = _mm256_fmadd_pd(_mm256_loadu_pd(rate.data() + i), diff, _mm256_loadu_pd(out.data() + i));
    _mm256_storeu_pd(out.data() + i, r);
  }
  for (; i < n; ++i) out[i] += rate[i] * (shifted[i] - base[i]);
}

constexpr KernelTable kAvx2{
    sum_avx2,         sum_abs_avx2, dot_avx2,     sum_abs_diff_avx2,
    max_abs_diff_avx2, axpy_avx2,   mul_acc_avx2, jump_diff_acc_avx2,
};

}  // namespace

const KernelTable* avx2_table_impl() noexcept { return &kAvx2; }

}  // namespace popeq::kernels
