// SPDX-License-Identifier: Apache-2.0
//
// Backend selection. AVX2 requires both compile-time support in the avx2
// translation unit and a runtime CPU check; RADCOM_KERNELS overrides.

#include "radcom/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace radcom::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Selection {
  const detail::Ops* ops;
  Backend backend;
};

Selection resolve_default() {
  const char* env = std::getenv("RADCOM_KERNELS");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) {
    return {&detail::scalar_ops(), Backend::Scalar};
  }
  const bool want_avx2 = env == nullptr || std::strcmp(env, "avx2") == 0;
  if (want_avx2 && cpu_has_avx2() && detail::avx2_ops() != nullptr) {
    return {detail::avx2_ops(), Backend::Avx2};
  }
  return {&detail::scalar_ops(), Backend::Scalar};
}

std::atomic<const detail::Ops*>& ops_slot() {
  static std::atomic<const detail::Ops*> slot{nullptr};
  return slot;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{Backend::Scalar};
  return slot;
}

const detail::Ops& ops() {
  const detail::Ops* cur = ops_slot().load(std::memory_order_acquire);
  if (cur == nullptr) {
    const Selection sel = resolve_default();
    backend_slot().store(sel.backend, std::memory_order_relaxed);
    ops_slot().store(sel.ops, std::memory_order_release);
    return *sel.ops;
  }
  return *cur;
}

}  // namespace

Backend active_backend() {
  ops();
  return backend_slot().load(std::memory_order_relaxed);
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
      return cpu_has_avx2() && detail::avx2_ops() != nullptr;
  }
  return false;
}

bool set_backend(Backend b) {
  if (!backend_available(b)) {
    return false;
  }
  const detail::Ops* target =
      b == Backend::Avx2 ? detail::avx2_ops() : &detail::scalar_ops();
  backend_slot().store(b, std::memory_order_relaxed);
  ops_slot().store(target, std::memory_order_release);
  return true;
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

cdouble cdotu(const cdouble* a, const cdouble* b, std::size_t n) {
  return ops().cdotu(a, b, n);
}

cdouble cdotc(const cdouble* a, const cdouble* b, std::size_t n) {
  return ops().cdotc(a, b, n);
}

double sum_sq(const cdouble* a, std::size_t n) { return ops().sum_sq(a, n); }

double sq_dist(const cdouble* a, const cdouble* b, std::size_t n) {
  return ops().sq_dist(a, b, n);
}

void matvec(const cdouble* a, std::size_t rows, std::size_t cols, const cdouble* x,
            cdouble* y) {
  ops().matvec(a, rows, cols, x, y);
}

void matvec_residual(const cdouble* a, std::size_t rows, std::size_t cols,
                     const cdouble* x, const cdouble* b, cdouble* r) {
  ops().matvec_residual(a, rows, cols, x, b, r);
}

}  // namespace radcom::kernels
