// SPDX-License-Identifier: Apache-2.0
//
// Runtime-dispatched complex vector kernels.
//
// The solvers spend most of their time in short complex dot products and
// squared-norm reductions: the gradient-projection inner loops of the
// branch-and-bound bound solvers, the secular-function row weights of the
// trust-region solver, and the brute-force grid oracles in the test suites.
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The backend is selected once at first use and can be
// forced with set_backend() or the RADCOM_KERNELS environment variable
// ("scalar" or "avx2").

#pragma once

#include <complex>
#include <cstddef>

namespace radcom::kernels {

using cdouble = std::complex<double>;

enum class Backend { Scalar, Avx2 };

/// Backend chosen by the dispatcher (after env override, if any).
Backend active_backend();
bool backend_available(Backend b);
/// Force a backend. Returns false (and leaves the selection unchanged)
/// if the requested backend is not available on this machine.
bool set_backend(Backend b);
const char* backend_name(Backend b);

/// sum_i a[i] * b[i]  (unconjugated)
cdouble cdotu(const cdouble* a, const cdouble* b, std::size_t n);
/// sum_i conj(a[i]) * b[i]
cdouble cdotc(const cdouble* a, const cdouble* b, std::size_t n);
/// sum_i |a[i]|^2
double sum_sq(const cdouble* a, std::size_t n);
/// sum_i |a[i] - b[i]|^2
double sq_dist(const cdouble* a, const cdouble* b, std::size_t n);
/// y = A x with A row-major (rows x cols)
void matvec(const cdouble* a, std::size_t rows, std::size_t cols, const cdouble* x,
            cdouble* y);
/// r = A x - b with A row-major (rows x cols)
void matvec_residual(const cdouble* a, std::size_t rows, std::size_t cols,
                     const cdouble* x, const cdouble* b, cdouble* r);

namespace detail {

struct Ops {
  cdouble (*cdotu)(const cdouble*, const cdouble*, std::size_t);
  cdouble (*cdotc)(const cdouble*, const cdouble*, std::size_t);
  double (*sum_sq)(const cdouble*, std::size_t);
  double (*sq_dist)(const cdouble*, const cdouble*, std::size_t);
  void (*matvec)(const cdouble*, std::size_t, std::size_t, const cdouble*, cdouble*);
  void (*matvec_residual)(const cdouble*, std::size_t, std::size_t, const cdouble*,
                          const cdouble*, cdouble*);
};

// Direct entry points, used by the backend equivalence tests.
const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when unavailable

}  // namespace detail

}  // namespace radcom::kernels
