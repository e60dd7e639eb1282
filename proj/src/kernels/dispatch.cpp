#include <atomic>

#include "internal.hpp"

namespace quasipot::kernels {

namespace {

bool cpu_has_avx2() {
#if QUASIPOT_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() { return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar; }

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

const char* to_string(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "?";
}

bool backend_available(Backend backend) { return backend == Backend::Scalar || cpu_has_avx2(); }

Backend active_backend() { return current().load(std::memory_order_relaxed); }

bool set_backend(Backend backend) {
  if (!backend_available(backend)) return false;
  current().store(backend, std::memory_order_relaxed);
  return true;
}

double exp_sum(const double* v, std::size_t count, double scale, double ref) {
#if QUASIPOT_HAVE_AVX2
  if (active_backend() == Backend::Avx2) return detail::avx2_exp_sum(v, count, scale, ref);
#endif
  return detail::scalar_exp_sum(v, count, scale, ref);
}

DualSum dual_weighted_exp_sum(const double* v, const double* wa, const double* wb, std::size_t count, double scale,
                              double ref) {
#if QUASIPOT_HAVE_AVX2
  if (active_backend() == Backend::Avx2) return detail::avx2_dual_weighted_exp_sum(v, wa, wb, count, scale, ref);
#endif
  return detail::scalar_dual_weighted_exp_sum(v, wa, wb, count, scale, ref);
}

}  // namespace quasipot::kernels
