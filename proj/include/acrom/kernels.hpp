#pragma once
//
// Data-parallel inner loops used by the reduced model and the POD code.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds,
// an AVX2+FMA variant. The variant is selected once at runtime from CPUID;
// setting ACROM_SIMD=scalar in the environment forces the reference path.
//

#include <cstddef>
#include <span>
#include <string_view>

namespace acrom::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// ISA the dispatching entry points below currently use.
Isa active_isa();

/// True when the running CPU and the build both support `isa`.
bool isa_available(Isa isa);

/// Override the dispatch choice (tests use this to compare variants).
/// Throws acrom::Error when the ISA is unavailable.
void set_active_isa(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// out = sum_k weights[k] * slices[k*out.size() .. (k+1)*out.size()).
void weighted_slice_sum(std::span<const double> weights,
                        std::span<const double> slices,
                        std::span<double> out);

namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void weighted_slice_sum(std::span<const double> weights,
                        std::span<const double> slices,
                        std::span<double> out);
}  // namespace scalar

#if defined(ACROM_HAVE_AVX2)
namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void weighted_slice_sum(std::span<const double> weights,
                        std::span<const double> slices,
                        std::span<double> out);
}  // namespace avx2
#endif

}  // namespace acrom::kernels
