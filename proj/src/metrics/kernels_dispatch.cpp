#include <cstdlib>
#include <string_view>

#include "surveysim/metrics/kernels.hpp"

namespace surveysim::metrics::kernels {

#if defined(SURVEYSIM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(SURVEYSIM_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active_kernels() {
    static const KernelTable& chosen = []() -> const KernelTable& {
        const char* forced = std::getenv("SURVEYSIM_KERNELS");
        if (forced && std::string_view(forced) == "scalar") return scalar_kernels();
        if (const auto* simd = avx2_kernels()) return *simd;
        return scalar_kernels();
    }();
    return chosen;
}

}  // namespace surveysim::metrics::kernels
