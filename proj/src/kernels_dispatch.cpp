#include <cstdlib>
#include <string_view>

#include "parasdc/kernels.hpp"

namespace parasdc::kernels {

#if defined(PARASDC_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(PARASDC_HAVE_NEON)
const KernelTable& neon_table();
#endif

const KernelTable* simd_table() {
#if defined(PARASDC_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table() : nullptr;
#elif defined(PARASDC_HAVE_NEON)
  return &neon_table();
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* env = std::getenv("PARASDC_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_table();
    const KernelTable* simd = simd_table();
    return simd != nullptr ? *simd : scalar_table();
  }();
  return table;
}

}  // namespace parasdc::kernels
