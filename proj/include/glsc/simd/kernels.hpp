#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

// Vector kernels behind the embedding store and clustering distance loops.
//
// Every kernel has a scalar reference implementation plus optional AVX2 (x86-64)
// and NEON (AArch64) variants. The variant is picked once at runtime from CPU
// capabilities; GLSC_SIMD=scalar|avx2|neon or set_active_isa() overrides it.
// All variants accumulate in double. Float products are exact in double, so
// variants differ only in summation order.

namespace glsc::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view to_string(Isa isa);

// Variants compiled in and supported by this CPU, scalar first.
std::vector<Isa> available_isas();
Isa best_available_isa();
Isa active_isa();
// Throws glsc::Error(kInvalidArgument) if the variant is not available.
void set_active_isa(Isa isa);

double dot(const float* a, const float* b, std::size_t n);
double squared_l2(const float* a, const float* b, std::size_t n);
// Point (float) to centroid (double) squared distance.
double squared_l2_mixed(const float* a, const double* b, std::size_t n);

namespace scalar {
double dot(const float* a, const float* b, std::size_t n);
double squared_l2(const float* a, const float* b, std::size_t n);
double squared_l2_mixed(const float* a, const double* b, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define GLSC_SIMD_HAVE_AVX2 1
namespace avx2 {
double dot(const float* a, const float* b, std::size_t n);
double squared_l2(const float* a, const float* b, std::size_t n);
double squared_l2_mixed(const float* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define GLSC_SIMD_HAVE_NEON 1
namespace neon {
double dot(const float* a, const float* b, std::size_t n);
double squared_l2(const float* a, const float* b, std::size_t n);
double squared_l2_mixed(const float* a, const double* b, std::size_t n);
}  // namespace neon
#endif

// Runs a kernel explicitly on one variant (used by equivalence tests).
double dot_with(Isa isa, const float* a, const float* b, std::size_t n);
double squared_l2_with(Isa isa, const float* a, const float* b, std::size_t n);
double squared_l2_mixed_with(Isa isa, const float* a, const double* b, std::size_t n);

}  // namespace glsc::simd
