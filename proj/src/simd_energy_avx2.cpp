#if defined(__x86_64__)

#include <immintrin.h>

#include "chlab/simd_energy.hpp"

namespace chlab::simd {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

}  // namespace

EnergyTriple energy_accum_avx2(const double* widths, const double* u_left,
                               const double* u_right, std::size_t n) {
  const __m256d third = _mm256_set1_pd(1.0 / 3.0);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc_u = zero, acc_p = zero, acc_m = zero;

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w = _mm256_loadu_pd(widths + i);
    const __m256d ul = _mm256_loadu_pd(u_left + i);
    const __m256d ur = _mm256_loadu_pd(u_right + i);

    const __m256d quad = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(ul, ul), _mm256_mul_pd(ul, ur)),
        _mm256_mul_pd(ur, ur));
    acc_u = _mm256_add_pd(acc_u, _mm256_mul_pd(_mm256_mul_pd(w, quad), third));

    const __m256d d = _mm256_sub_pd(ur, ul);
    const __m256d s2w = _mm256_div_pd(_mm256_mul_pd(d, d), w);
    const __m256d pos = _mm256_cmp_pd(d, zero, _CMP_GT_OQ);
    const __m256d neg = _mm256_cmp_pd(d, zero, _CMP_LT_OQ);
    acc_p = _mm256_add_pd(acc_p, _mm256_and_pd(s2w, pos));
    acc_m = _mm256_add_pd(acc_m, _mm256_and_pd(s2w, neg));
  }

  EnergyTriple acc{hsum(acc_u), hsum(acc_p), hsum(acc_m)};
  if (i < n) {
    const EnergyTriple tail =
        energy_accum_scalar(widths + i, u_left + i, u_right + i, n - i);
    acc.e_u += tail.e_u;
    acc.e_plus += tail.e_plus;
    acc.e_minus += tail.e_minus;
  }
  return acc;
}

}  // namespace chlab::simd

#endif  // __x86_64__
