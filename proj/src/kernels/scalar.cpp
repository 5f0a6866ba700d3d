#include "kernels_impl.hpp"

namespace multierg::kernels::scalar {

double gather_sum(const Symbol* sym, std::size_t n, const double* table) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += table[sym[k]];
    return acc;
}

double strided_gather_sum(const Symbol* sym, std::size_t n, int q, const double* table) {
    const std::size_t count = n / static_cast<std::size_t>(q);
    double acc = 0.0;
    for (std::size_t j = 1; j <= count; ++j) acc += table[sym[q * j - 1]];
    return acc;
}

double pair_gather_sum(const Symbol* sym, std::size_t n, int q, const double* table, int m) {
    const std::size_t count = n / static_cast<std::size_t>(q);
    double acc = 0.0;
    for (std::size_t k = 1; k <= count; ++k) acc += table[sym[k - 1] * m + sym[q * k - 1]];
    return acc;
}

void convolve(const double* a, std::size_t na, const double* b, std::size_t nb, double* out) {
    const std::size_t nout = na + nb - 1;
    for (std::size_t i = 0; i < nout; ++i) out[i] = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        double* dst = out + i;
        for (std::size_t j = 0; j < nb; ++j) dst[j] += ai * b[j];
    }
}

} // namespace multierg::kernels::scalar
