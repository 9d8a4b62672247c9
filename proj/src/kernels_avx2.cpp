// AVX2+FMA kernels. Compiled with -mavx2 -mfma; only reached after the
// dispatcher has verified CPU support.

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

#include "otmatch/kernels.hpp"

namespace otmatch::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// exp on 4 doubles, Cephes-style: range reduction by ln2 (hi/lo split), a
// degree-2/3 rational approximation of exp(r) on [-ln2/2, ln2/2], then a 2^n
// exponent-bit scale. Saturates at +-709 / -708.4; inputs below the lower
// clamp return exactly 0. Accuracy ~2 ulp against std::exp.
inline __m256d exp_pd(__m256d x) {
  const __m256d kExpHi = _mm256_set1_pd(709.0);
  const __m256d kExpLo = _mm256_set1_pd(-708.396418532264106224);
  const __m256d kLog2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d kC1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d kC2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d kP0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d kP1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d kP2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d kQ0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d kQ1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d kQ2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d kQ3 = _mm256_set1_pd(2.00000000000000000005e0);
  const __m256d kHalf = _mm256_set1_pd(0.5);
  const __m256d kOne = _mm256_set1_pd(1.0);
  const __m256d kTwo = _mm256_set1_pd(2.0);

  const __m256d underflow = _mm256_cmp_pd(x, kExpLo, _CMP_LT_OQ);
  x = _mm256_min_pd(x, kExpHi);
  x = _mm256_max_pd(x, kExpLo);

  // n = floor(x/ln2 + 1/2); exact, n fits in int32.
  const __m256d n = _mm256_floor_pd(_mm256_fmadd_pd(x, kLog2e, kHalf));
  const __m128i n32 = _mm256_cvtpd_epi32(n);

  // r = x - n*ln2 using the split ln2 = C1 + C2 for extra precision.
  x = _mm256_fnmadd_pd(n, kC1, x);
  x = _mm256_fnmadd_pd(n, kC2, x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d p = _mm256_fmadd_pd(kP0, xx, kP1);
  p = _mm256_fmadd_pd(p, xx, kP2);
  p = _mm256_mul_pd(p, x);
  __m256d q = _mm256_fmadd_pd(kQ0, xx, kQ1);
  q = _mm256_fmadd_pd(q, xx, kQ2);
  q = _mm256_fmadd_pd(q, xx, kQ3);

  // exp(r) = 1 + 2 p/(q - p)
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(e, kTwo, kOne);

  // scale by 2^n via the exponent bits; n >= -1022 after the clamp, so the
  // constructed power of two stays normal.
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i pow2 =
      _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(pow2));

  return _mm256_andnot_pd(underflow, e);
}

double l2_sq_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 =
        _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4),
                           acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double vmax_avx2(const double* a, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_loadu_pd(a);
    for (i = 4; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(a + i));
    m = hmax(acc);
  }
  for (; i < n; ++i) m = a[i] > m ? a[i] : m;
  return m;
}

double sum_exp_avx2(const double* a, std::size_t n, double shift) {
  const __m256d sh = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), sh)));
  }
  double s = hsum(acc);
  if (i < n) {
    // run the tail through the same vector path so lane count does not change
    // the per-element result
    alignas(32) double buf[4];
    alignas(32) double out[4];
    std::size_t k = 0;
    for (; i < n; ++i, ++k) buf[k] = a[i];
    for (std::size_t z = k; z < 4; ++z) buf[z] = shift - 1000.0;
    _mm256_store_pd(out, exp_pd(_mm256_sub_pd(_mm256_load_pd(buf), sh)));
    for (std::size_t z = 0; z < k; ++z) s += out[z];
  }
  return s;
}

void sub_scale_avx2(double* dst, const double* a, const double* b, double s,
                    std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(
        dst + i,
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)),
                      vs));
  }
  for (; i < n; ++i) dst[i] = (a[i] - b[i]) * s;
}

constexpr KernelTable kAvx2Table = {
    l2_sq_avx2, dot_avx2,       sum_avx2, vmax_avx2,
    sum_exp_avx2, sub_scale_avx2, "avx2",
};

}  // namespace

namespace detail {
const KernelTable* avx2_kernels_impl() { return &kAvx2Table; }
}  // namespace detail

}  // namespace otmatch::kernels
