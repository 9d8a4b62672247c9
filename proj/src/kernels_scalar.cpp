// Scalar reference kernels. These define the semantics the SIMD variants are
// tested against.

#include <cmath>
#include <limits>

#include "otmatch/kernels.hpp"

namespace otmatch::kernels {
namespace {

double l2_sq_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double vmax_scalar(const double* a, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = a[i] > m ? a[i] : m;
  return m;
}

double sum_exp_scalar(const double* a, std::size_t n, double shift) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::exp(a[i] - shift);
  return acc;
}

void sub_scale_scalar(double* dst, const double* a, const double* b, double s,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = (a[i] - b[i]) * s;
}

constexpr KernelTable kScalarTable = {
    l2_sq_scalar, dot_scalar,       sum_scalar, vmax_scalar,
    sum_exp_scalar, sub_scale_scalar, "scalar",
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalarTable; }

}  // namespace otmatch::kernels
