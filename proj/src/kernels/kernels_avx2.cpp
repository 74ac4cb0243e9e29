// SPDX-License-Identifier: Apache-2.0
//
// AVX2+FMA kernels. Complex doubles stay interleaved (re, im), two per
// 256-bit register; multiplies use the movedup/permute/fmaddsub idiom.
// This translation unit is compiled with -mavx2 -mfma and must only be
// entered after the runtime CPU check in the dispatcher.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "radcom/kernels.hpp"

namespace radcom::kernels::detail {

namespace {

inline __m256d cmul_accum(__m256d acc, __m256d x, __m256d y) {
  const __m256d xr = _mm256_movedup_pd(x);
  const __m256d xi = _mm256_permute_pd(x, 0xF);
  const __m256d ys = _mm256_permute_pd(y, 0x5);
  return _mm256_add_pd(acc, _mm256_fmaddsub_pd(xr, y, _mm256_mul_pd(xi, ys)));
}

inline __m256d cmul_conj_accum(__m256d acc, __m256d x, __m256d y) {
  const __m256d xr = _mm256_movedup_pd(x);
  const __m256d xi = _mm256_permute_pd(x, 0xF);
  const __m256d ys = _mm256_permute_pd(y, 0x5);
  return _mm256_add_pd(acc, _mm256_fmsubadd_pd(xr, y, _mm256_mul_pd(xi, ys)));
}

inline cdouble reduce_complex(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return {_mm_cvtsd_f64(s), _mm_cvtsd_f64(_mm_unpackhi_pd(s, s))};
}

inline double reduce_scalar(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

cdouble cdotu_avx2(const cdouble* a, const cdouble* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  for (; i + 2 <= n; i += 2) {
    acc = cmul_accum(acc, _mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i));
  }
  cdouble out = reduce_complex(acc);
  if (i < n) {
    out += a[i] * b[i];
  }
  return out;
}

cdouble cdotc_avx2(const cdouble* a, const cdouble* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  for (; i + 2 <= n; i += 2) {
    acc = cmul_conj_accum(acc, _mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i));
  }
  cdouble out = reduce_complex(acc);
  if (i < n) {
    out += std::conj(a[i]) * b[i];
  }
  return out;
}

double sum_sq_avx2(const cdouble* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const double* pa = reinterpret_cast<const double*>(a);
  for (; i + 2 <= n; i += 2) {
    const __m256d x = _mm256_loadu_pd(pa + 2 * i);
    acc = _mm256_fmadd_pd(x, x, acc);
  }
  double out = reduce_scalar(acc);
  if (i < n) {
    out += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return out;
}

double sq_dist_avx2(const cdouble* a, const cdouble* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  for (; i + 2 <= n; i += 2) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double out = reduce_scalar(acc);
  if (i < n) {
    const double dr = a[i].real() - b[i].real();
    const double di = a[i].imag() - b[i].imag();
    out += dr * dr + di * di;
  }
  return out;
}

void matvec_avx2(const cdouble* a, std::size_t rows, std::size_t cols, const cdouble* x,
                 cdouble* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = cdotu_avx2(a + r * cols, x, cols);
  }
}

void matvec_residual_avx2(const cdouble* a, std::size_t rows, std::size_t cols,
                          const cdouble* x, const cdouble* b, cdouble* r) {
  for (std::size_t k = 0; k < rows; ++k) {
    r[k] = cdotu_avx2(a + k * cols, x, cols) - b[k];
  }
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops ops = {cdotu_avx2,   cdotc_avx2,   sum_sq_avx2,
                          sq_dist_avx2, matvec_avx2, matvec_residual_avx2};
  return &ops;
}

}  // namespace radcom::kernels::detail

#else

#include "radcom/kernels.hpp"

namespace radcom::kernels::detail {
const Ops* avx2_ops() { return nullptr; }
}  // namespace radcom::kernels::detail

#endif
