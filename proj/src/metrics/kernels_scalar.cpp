#include <cmath>

#include "surveysim/metrics/kernels.hpp"

namespace surveysim::metrics::kernels {

namespace scalar {

double abs_diff_sum(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += std::fabs(a[i] - b[i]);
    return sum;
}

double squared_diff_sum(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

double dot(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void accumulate(double* dst, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

}  // namespace scalar

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", scalar::abs_diff_sum, scalar::squared_diff_sum, scalar::dot,
                                   scalar::accumulate};
    return table;
}

}  // namespace surveysim::metrics::kernels
