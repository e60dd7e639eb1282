#include <immintrin.h>

#include <cmath>

#include "internal.hpp"

namespace quasipot::kernels::detail {

namespace {

// exp for x <= 0 (Cephes rational approximation, about 1 ulp). Inputs below
// -708 are clamped; their contribution is below the double resolution of any
// sum that also contains exp(0).
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  x = _mm256_max_pd(x, lo);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125E-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212E-6);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, c1, x);
  r = _mm256_fnmadd_pd(k, c2, r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.00000000000000000009E0));
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(e, _mm256_set1_pd(2.0), _mm256_set1_pd(1.0));

  // 2^k via the exponent field; k is an integer in [-1022, 0].
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 1.5 * 2^52
  const __m256i ki = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, magic)), _mm256_castpd_si256(magic));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double avx2_exp_sum(const double* v, std::size_t count, double scale, double ref) {
  const __m256d vs = _mm256_set1_pd(scale);
  const __m256d vr = _mm256_set1_pd(ref);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= count; k += 8) {
    const __m256d x0 = _mm256_mul_pd(vs, _mm256_sub_pd(_mm256_loadu_pd(v + k), vr));
    const __m256d x1 = _mm256_mul_pd(vs, _mm256_sub_pd(_mm256_loadu_pd(v + k + 4), vr));
    acc0 = _mm256_add_pd(acc0, exp_nonpositive(x0));
    acc1 = _mm256_add_pd(acc1, exp_nonpositive(x1));
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < count; ++k) sum += std::exp(scale * (v[k] - ref));
  return sum;
}

DualSum avx2_dual_weighted_exp_sum(const double* v, const double* wa, const double* wb, std::size_t count,
                                   double scale, double ref) {
  const __m256d vs = _mm256_set1_pd(scale);
  const __m256d vr = _mm256_set1_pd(ref);
  __m256d acc_a = _mm256_setzero_pd(), acc_b = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    const __m256d e = exp_nonpositive(_mm256_mul_pd(vs, _mm256_sub_pd(_mm256_loadu_pd(v + k), vr)));
    acc_a = _mm256_fmadd_pd(_mm256_loadu_pd(wa + k), e, acc_a);
    acc_b = _mm256_fmadd_pd(_mm256_loadu_pd(wb + k), e, acc_b);
  }
  DualSum s{hsum(acc_a), hsum(acc_b)};
  for (; k < count; ++k) {
    const double e = std::exp(scale * (v[k] - ref));
    s.a += wa[k] * e;
    s.b += wb[k] * e;
  }
  return s;
}

}  // namespace quasipot::kernels::detail
