#include <atomic>
#include <cstdlib>
#include <string>

#include "glsc/error.hpp"
#include "glsc/simd/kernels.hpp"

namespace glsc::simd {

namespace {

using Kernel = double (*)(const float*, const float*, std::size_t);
using MixedKernel = double (*)(const float*, const double*, std::size_t);

struct KernelTable {
  Isa isa;
  Kernel dot;
  Kernel squared_l2;
  MixedKernel squared_l2_mixed;
};

constexpr KernelTable kScalarTable{Isa::kScalar, &scalar::dot, &scalar::squared_l2,
                                   &scalar::squared_l2_mixed};
#ifdef GLSC_SIMD_HAVE_AVX2
constexpr KernelTable kAvx2Table{Isa::kAvx2, &avx2::dot, &avx2::squared_l2,
                                 &avx2::squared_l2_mixed};
#endif
#ifdef GLSC_SIMD_HAVE_NEON
constexpr KernelTable kNeonTable{Isa::kNeon, &neon::dot, &neon::squared_l2,
                                 &neon::squared_l2_mixed};
#endif

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#ifdef GLSC_SIMD_HAVE_AVX2
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#ifdef GLSC_SIMD_HAVE_NEON
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &kScalarTable;
    case Isa::kAvx2:
#ifdef GLSC_SIMD_HAVE_AVX2
      return &kAvx2Table;
#else
      return nullptr;
#endif
    case Isa::kNeon:
#ifdef GLSC_SIMD_HAVE_NEON
      return &kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable* initial_table() {
  Isa isa = best_available_isa();
  if (const char* env = std::getenv("GLSC_SIMD")) {
    const std::string name(env);
    for (Isa candidate : available_isas()) {
      if (name == to_string(candidate)) isa = candidate;
    }
  }
  return table_for(isa);
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

const KernelTable& checked_table(Isa isa) {
  if (!cpu_supports(isa) || table_for(isa) == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "SIMD variant '" + std::string(to_string(isa)) + "' is not available");
  }
  return *table_for(isa);
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "scalar";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (cpu_supports(isa) && table_for(isa) != nullptr) out.push_back(isa);
  }
  return out;
}

Isa best_available_isa() { return available_isas().back(); }

Isa active_isa() { return active_table().load()->isa; }

void set_active_isa(Isa isa) { active_table().store(&checked_table(isa)); }

double dot(const float* a, const float* b, std::size_t n) {
  return active_table().load(std::memory_order_relaxed)->dot(a, b, n);
}

double squared_l2(const float* a, const float* b, std::size_t n) {
  return active_table().load(std::memory_order_relaxed)->squared_l2(a, b, n);
}

double squared_l2_mixed(const float* a, const double* b, std::size_t n) {
  return active_table().load(std::memory_order_relaxed)->squared_l2_mixed(a, b, n);
}

double dot_with(Isa isa, const float* a, const float* b, std::size_t n) {
  return checked_table(isa).dot(a, b, n);
}

double squared_l2_with(Isa isa, const float* a, const float* b, std::size_t n) {
  return checked_table(isa).squared_l2(a, b, n);
}

double squared_l2_mixed_with(Isa isa, const float* a, const double* b, std::size_t n) {
  return checked_table(isa).squared_l2_mixed(a, b, n);
}

}  // namespace glsc::simd
