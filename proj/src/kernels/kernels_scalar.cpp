// SPDX-License-Identifier: Apache-2.0
//
// Scalar reference kernels. These define the semantics; the SIMD variants
// must agree with them up to floating-point reassociation.

#include "radcom/kernels.hpp"

namespace radcom::kernels::detail {

namespace {

cdouble cdotu_scalar(const cdouble* a, const cdouble* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br - ai * bi;
    im += ar * bi + ai * br;
  }
  return {re, im};
}

cdouble cdotc_scalar(const cdouble* a, const cdouble* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

double sum_sq_scalar(const cdouble* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return acc;
}

double sq_dist_scalar(const cdouble* a, const cdouble* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dr = a[i].real() - b[i].real();
    const double di = a[i].imag() - b[i].imag();
    acc += dr * dr + di * di;
  }
  return acc;
}

void matvec_scalar(const cdouble* a, std::size_t rows, std::size_t cols,
                   const cdouble* x, cdouble* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = cdotu_scalar(a + r * cols, x, cols);
  }
}

void matvec_residual_scalar(const cdouble* a, std::size_t rows, std::size_t cols,
                            const cdouble* x, const cdouble* b, cdouble* r) {
  for (std::size_t k = 0; k < rows; ++k) {
    r[k] = cdotu_scalar(a + k * cols, x, cols) - b[k];
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {cdotu_scalar,   cdotc_scalar, sum_sq_scalar,
                          sq_dist_scalar, matvec_scalar, matvec_residual_scalar};
  return ops;
}

}  // namespace radcom::kernels::detail
