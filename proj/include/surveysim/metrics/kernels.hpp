#pragma once

#include <cstddef>
#include <string_view>

namespace surveysim::metrics::kernels {

// Arithmetic inner loops behind the distance metrics. Every table computes the
// same quantities; SIMD tables may differ from scalar only in summation order.
struct KernelTable {
    std::string_view name;
    double (*abs_diff_sum)(const double* a, const double* b, std::size_t n);      // sum |a-b|
    double (*squared_diff_sum)(const double* a, const double* b, std::size_t n);  // sum (a-b)^2
    double (*dot)(const double* a, const double* b, std::size_t n);               // sum a*b
    void (*accumulate)(double* dst, const double* src, std::size_t n);            // dst += src
};

const KernelTable& scalar_kernels();

// nullptr when the build has no AVX2 variant or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

// Best table for this CPU, chosen once. SURVEYSIM_KERNELS=scalar forces the
// reference implementation.
const KernelTable& active_kernels();

}  // namespace surveysim::metrics::kernels
