#include "acrom/error.hpp"
#include "acrom/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace acrom::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(ACROM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("ACROM_SIMD")) {
    if (std::string(env) == "scalar") return Isa::Scalar;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

bool isa_available(Isa isa) {
  if (isa == Isa::Scalar) return true;
  return cpu_has_avx2();
}

void set_active_isa(Isa isa) {
  if (!isa_available(isa))
    throw Error("kernels: ISA " + std::string(isa_name(isa)) + " not available on this CPU/build");
  current().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("kernels::dot: length mismatch");
#ifdef ACROM_HAVE_AVX2
  if (active_isa() == Isa::Avx2) return avx2::dot(x, y);
#endif
  return scalar::dot(x, y);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw DimensionError("kernels::axpy: length mismatch");
#ifdef ACROM_HAVE_AVX2
  if (active_isa() == Isa::Avx2) return avx2::axpy(alpha, x, y);
#endif
  scalar::axpy(alpha, x, y);
}

void weighted_slice_sum(std::span<const double> weights,
                        std::span<const double> slices,
                        std::span<double> out) {
  if (slices.size() != weights.size() * out.size())
    throw DimensionError("kernels::weighted_slice_sum: slices do not match weights x out");
#ifdef ACROM_HAVE_AVX2
  if (active_isa() == Isa::Avx2) return avx2::weighted_slice_sum(weights, slices, out);
#endif
  scalar::weighted_slice_sum(weights, slices, out);
}

}  // namespace acrom::kernels
