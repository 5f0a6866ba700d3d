#pragma once

#include "multierg/kernels.hpp"

namespace multierg::kernels {

namespace scalar {
double gather_sum(const Symbol* sym, std::size_t n, const double* table);
double strided_gather_sum(const Symbol* sym, std::size_t n, int q, const double* table);
double pair_gather_sum(const Symbol* sym, std::size_t n, int q, const double* table, int m);
void convolve(const double* a, std::size_t na, const double* b, std::size_t nb, double* out);
} // namespace scalar

#if defined(MULTIERG_HAVE_AVX2)
namespace avx2 {
double gather_sum(const Symbol* sym, std::size_t n, const double* table);
double strided_gather_sum(const Symbol* sym, std::size_t n, int q, const double* table);
double pair_gather_sum(const Symbol* sym, std::size_t n, int q, const double* table, int m);
void convolve(const double* a, std::size_t na, const double* b, std::size_t nb, double* out);
} // namespace avx2
#endif

} // namespace multierg::kernels
