#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "otmatch/kernels.hpp"

using namespace otmatch;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937& rng, double lo = -10.0,
                               double hi = 10.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

struct BackendGuard {
  kernels::Backend saved;
  BackendGuard() : saved(kernels::active_backend()) {}
  ~BackendGuard() { kernels::set_backend(saved); }
};

}  // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("scalar kernels match naive formulas") {
  const auto& k = kernels::scalar_kernels();
  std::mt19937 rng(7);
  const auto a = random_vec(17, rng);
  const auto b = random_vec(17, rng);

  double l2 = 0.0, dot = 0.0, sum = 0.0, mx = a[0];
  for (std::size_t i = 0; i < a.size(); ++i) {
    l2 += (a[i] - b[i]) * (a[i] - b[i]);
    dot += a[i] * b[i];
    sum += a[i];
    mx = std::max(mx, a[i]);
  }
  CHECK(k.l2_sq(a.data(), b.data(), a.size()) == doctest::Approx(l2).epsilon(1e-14));
  CHECK(k.dot(a.data(), b.data(), a.size()) == doctest::Approx(dot).epsilon(1e-14));
  CHECK(k.sum(a.data(), a.size()) == doctest::Approx(sum).epsilon(1e-14));
  CHECK(k.vmax(a.data(), a.size()) == mx);
  CHECK(k.vmax(a.data(), 0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const kernels::KernelTable* simd = kernels::avx2_kernels();
  if (simd == nullptr) return;  // machine without AVX2: dispatch covers this
  const auto& ref = kernels::scalar_kernels();

  std::mt19937 rng(42);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 100u, 1001u}) {
    CAPTURE(n);
    const auto a = random_vec(n, rng);
    const auto b = random_vec(n, rng);
    const double tol = 1e-12 * (1.0 + static_cast<double>(n));

    CHECK(simd->l2_sq(a.data(), b.data(), n) ==
          doctest::Approx(ref.l2_sq(a.data(), b.data(), n)).epsilon(tol));
    CHECK(simd->dot(a.data(), b.data(), n) ==
          doctest::Approx(ref.dot(a.data(), b.data(), n)).epsilon(tol));
    CHECK(simd->sum(a.data(), n) == doctest::Approx(ref.sum(a.data(), n)).epsilon(tol));
    CHECK(simd->vmax(a.data(), n) == ref.vmax(a.data(), n));  // max is exact

    std::vector<double> d1(n), d2(n);
    simd->sub_scale(d1.data(), a.data(), b.data(), 1.7, n);
    ref.sub_scale(d2.data(), a.data(), b.data(), 1.7, n);
    for (std::size_t i = 0; i < n; ++i) CHECK(d1[i] == d2[i]);

    const double shift = ref.vmax(a.data(), n);
    if (n > 0) {
      CHECK(simd->sum_exp(a.data(), n, shift) ==
            doctest::Approx(ref.sum_exp(a.data(), n, shift)).epsilon(1e-12 * (1.0 + n)));
    }
  }
}

TEST_CASE("vectorized exp tracks std::exp across its range") {
  const kernels::KernelTable* simd = kernels::avx2_kernels();
  if (simd == nullptr) return;
  // sum_exp over a single element isolates one exp evaluation
  for (double x : {-800.0, -708.5, -708.0, -700.0, -150.0, -30.0, -1.0, -1e-12, 0.0,
                   0.5, 1.0, 20.0, 100.0, 700.0}) {
    CAPTURE(x);
    const double got = simd->sum_exp(&x, 1, 0.0);
    const double want = std::exp(x);
    CHECK(std::abs(got - want) <= 1e-13 * want + 1e-300);
  }
}

TEST_CASE("logsumexp is exact on analytic inputs and stable on huge ones") {
  // log(e^0 + e^0) = log 2
  std::vector<double> two_zeros{0.0, 0.0};
  CHECK(kernels::logsumexp(two_zeros.data(), 2) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));

  // shifting all inputs shifts the result
  std::mt19937 rng(3);
  auto v = random_vec(33, rng, -2.0, 2.0);
  const double base = kernels::logsumexp(v.data(), v.size());
  for (double& x : v) x += 1000.0;  // naive exp would overflow
  CHECK(kernels::logsumexp(v.data(), v.size()) ==
        doctest::Approx(base + 1000.0).epsilon(1e-12));

  CHECK(kernels::logsumexp(v.data(), 0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("backend switching") {
  BackendGuard guard;
  kernels::set_backend(kernels::Backend::Scalar);
  CHECK(kernels::active_backend() == kernels::Backend::Scalar);
  std::vector<double> v{1.0, 2.0, 3.0};
  CHECK(kernels::sum(v.data(), 3) == 6.0);

  if (kernels::avx2_kernels() != nullptr) {
    kernels::set_backend(kernels::Backend::Avx2);
    CHECK(kernels::active_backend() == kernels::Backend::Avx2);
    CHECK(kernels::sum(v.data(), 3) == 6.0);
  } else {
    CHECK_THROWS_AS(kernels::set_backend(kernels::Backend::Avx2), std::runtime_error);
  }
}

TEST_SUITE_END();
