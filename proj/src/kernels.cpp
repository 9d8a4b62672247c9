// Backend selection for the inner-loop kernels.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "otmatch/kernels.hpp"

namespace otmatch::kernels {

#if defined(OTMATCH_HAVE_AVX2)
namespace detail {
const KernelTable* avx2_kernels_impl();
}
#endif

const KernelTable* avx2_kernels() {
#if defined(OTMATCH_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return detail::avx2_kernels_impl();
  }
#endif
  return nullptr;
}

namespace {

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* detect() {
  if (const char* env = std::getenv("OTMATCH_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_kernels();
    if (std::strcmp(env, "avx2") == 0) {
      if (const KernelTable* t = avx2_kernels()) return t;
      // requested but unavailable: fall through to autodetect
    }
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

}  // namespace

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = detect();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

Backend active_backend() {
  return &active() == &scalar_kernels() ? Backend::Scalar : Backend::Avx2;
}

void set_backend(Backend b) {
  if (b == Backend::Scalar) {
    g_active.store(&scalar_kernels(), std::memory_order_release);
    return;
  }
  const KernelTable* t = avx2_kernels();
  if (t == nullptr) {
    throw std::runtime_error("kernels: AVX2 backend unavailable on this machine");
  }
  g_active.store(t, std::memory_order_release);
}

double l2(const double* a, const double* b, std::size_t n) {
  return std::sqrt(active().l2_sq(a, b, n));
}

double logsumexp(const double* a, std::size_t n) {
  if (n == 0) return -std::numeric_limits<double>::infinity();
  const double m = active().vmax(a, n);
  if (!std::isfinite(m)) return m;  // all -inf, or a +-inf/nan input
  return m + std::log(active().sum_exp(a, n, m));
}

}  // namespace otmatch::kernels
