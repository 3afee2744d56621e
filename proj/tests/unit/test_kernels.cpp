#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "acrom/error.hpp"
#include "acrom/kernels.hpp"

using namespace acrom;

namespace {

std::vector<double> uniform_values(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double abs_sum(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] * b[i]);
  return s;
}

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u}) {
    const auto x = uniform_values(n, rng), y = uniform_values(n, rng);
    double ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) ref += x[i] * y[i];
    CHECK(std::abs(kernels::scalar::dot(x, y) - ref) <= 1e-15 * (abs_sum(x, y) + 1.0));

    auto z = y;
    kernels::scalar::axpy(0.5, x, z);
    for (std::size_t i = 0; i < n; ++i) CHECK(z[i] == y[i] + 0.5 * x[i]);
  }
  const std::vector<double> w{2.0, -1.0};
  const std::vector<double> slices{1, 2, 3, 10, 20, 30};
  std::vector<double> out(3);
  kernels::scalar::weighted_slice_sum(w, slices, out);
  CHECK(out == std::vector<double>{-8.0, -16.0, -24.0});
}

TEST_CASE("dispatch reports a usable ISA and honours overrides") {
  CHECK(kernels::isa_available(kernels::Isa::Scalar));
  const auto before = kernels::active_isa();
  CHECK(kernels::isa_available(before));
  kernels::set_active_isa(kernels::Isa::Scalar);
  CHECK(kernels::active_isa() == kernels::Isa::Scalar);
  CHECK(kernels::isa_name(kernels::Isa::Scalar) == "scalar");
  kernels::set_active_isa(before);
}

#if defined(ACROM_HAVE_AVX2)
TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!kernels::isa_available(kernels::Isa::Avx2)) {
    MESSAGE("CPU lacks AVX2; equivalence test skipped");
    return;
  }
  std::mt19937_64 rng(2);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto x = uniform_values(n, rng), y = uniform_values(n, rng);
    const double a = kernels::scalar::dot(x, y), b = kernels::avx2::dot(x, y);
    CHECK(std::abs(a - b) <= 1e-15 * (abs_sum(x, y) + 1.0));

    auto ys = y, yv = y;
    kernels::scalar::axpy(-0.75, x, ys);
    kernels::avx2::axpy(-0.75, x, yv);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ys[i] - yv[i]) <= 1e-15 * (std::abs(ys[i]) + 1.0));
  }
  for (std::size_t rows : {1u, 5u, 8u, 13u, 50u})
    for (std::size_t k : {0u, 1u, 4u, 9u}) {
      const auto w = uniform_values(k, rng), slices = uniform_values(k * rows, rng);
      std::vector<double> s(rows, 7.0), v(rows, 7.0);
      kernels::scalar::weighted_slice_sum(w, slices, s);
      kernels::avx2::weighted_slice_sum(w, slices, v);
      for (std::size_t i = 0; i < rows; ++i) CHECK(std::abs(s[i] - v[i]) <= 1e-14);
    }
}

TEST_CASE("dispatching entry points follow the active ISA") {
  if (!kernels::isa_available(kernels::Isa::Avx2)) return;
  std::mt19937_64 rng(3);
  const auto x = uniform_values(101, rng), y = uniform_values(101, rng);
  const auto before = kernels::active_isa();
  kernels::set_active_isa(kernels::Isa::Scalar);
  CHECK(kernels::dot(x, y) == kernels::scalar::dot(x, y));
  kernels::set_active_isa(kernels::Isa::Avx2);
  CHECK(kernels::dot(x, y) == kernels::avx2::dot(x, y));
  kernels::set_active_isa(before);
}
#endif

TEST_CASE("kernels reject mismatched lengths") {
  std::vector<double> a(3), b(4);
  CHECK_THROWS_AS(kernels::dot(a, b), Error);
  CHECK_THROWS_AS(kernels::axpy(1.0, a, b), Error);
  std::vector<double> w(2), slices(5), out(3);
  CHECK_THROWS_AS(kernels::weighted_slice_sum(w, slices, out), Error);
}
