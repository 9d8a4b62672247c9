// kernels.hpp - data-parallel inner-loop primitives with runtime backend dispatch.
//
// Every primitive exists as a scalar reference implementation and, on x86-64
// machines with AVX2+FMA, as a vectorized variant. The backend is picked once
// at startup (CPU detection, overridable via set_backend() or the
// OTMATCH_KERNELS environment variable: "scalar" or "avx2"). SIMD variants
// must agree with the scalar reference up to floating-point reassociation;
// tests/test_kernels.cpp holds the equivalence suite.
#pragma once

#include <cstddef>

namespace otmatch::kernels {

struct KernelTable {
  // squared Euclidean distance: sum_i (a[i]-b[i])^2
  double (*l2_sq)(const double* a, const double* b, std::size_t n);
  // inner product: sum_i a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i a[i]
  double (*sum)(const double* a, std::size_t n);
  // max_i a[i]; -inf for n == 0
  double (*vmax)(const double* a, std::size_t n);
  // sum_i exp(a[i] - shift)
  double (*sum_exp)(const double* a, std::size_t n, double shift);
  // dst[i] = (a[i] - b[i]) * s
  void (*sub_scale)(double* dst, const double* a, const double* b, double s,
                    std::size_t n);
  const char* name;
};

enum class Backend { Scalar, Avx2 };

const KernelTable& scalar_kernels();
// nullptr when AVX2 was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

Backend active_backend();
// Throws std::runtime_error when the requested backend is unavailable.
void set_backend(Backend b);
const KernelTable& active();

inline double l2_sq(const double* a, const double* b, std::size_t n) {
  return active().l2_sq(a, b, n);
}
inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline double sum(const double* a, std::size_t n) { return active().sum(a, n); }
inline double vmax(const double* a, std::size_t n) {
  return active().vmax(a, n);
}
inline double sum_exp(const double* a, std::size_t n, double shift) {
  return active().sum_exp(a, n, shift);
}
inline void sub_scale(double* dst, const double* a, const double* b, double s,
                      std::size_t n) {
  active().sub_scale(dst, a, b, s, n);
}

// Euclidean distance.
double l2(const double* a, const double* b, std::size_t n);
// log(sum_i exp(a[i])) computed with the max-shift trick; -inf for n == 0.
double logsumexp(const double* a, std::size_t n);

}  // namespace otmatch::kernels
