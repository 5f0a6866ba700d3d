#pragma once

// Data-parallel inner loops used by the telescopic-measure statistics and the
// covering-count oracle. Each kernel has a scalar reference implementation and,
// on x86-64, an AVX2/FMA variant selected at runtime. The variants agree up to
// summation order; tests/unit/test_kernels.cpp pins the equivalence.

#include <cstddef>
#include <span>
#include <string_view>

#include "multierg/system_model.hpp"

namespace multierg::kernels {

struct KernelSet {
    std::string_view name;

    // sum_k table[sym[k]]
    double (*gather_sum)(const Symbol* sym, std::size_t n, const double* table);
    // sum_{j=1}^{floor(n/q)} table[sym[q j - 1]]
    double (*strided_gather_sum)(const Symbol* sym, std::size_t n, int q, const double* table);
    // sum_{k=1}^{floor(n/q)} table[sym[k-1] * m + sym[q k - 1]]
    double (*pair_gather_sum)(const Symbol* sym, std::size_t n, int q, const double* table, int m);
    // out[0 .. na+nb-1) = a * b (full linear convolution, out overwritten)
    void (*convolve)(const double* a, std::size_t na, const double* b, std::size_t nb, double* out);
};

const KernelSet& scalar_kernels();

/// nullptr when not compiled in or when the CPU lacks AVX2/FMA.
const KernelSet* avx2_kernels();

/// Best available set. MULTIERG_KERNELS=scalar in the environment forces the
/// reference path.
const KernelSet& active();

double gather_sum(std::span<const Symbol> sym, std::span<const double> table);
double strided_gather_sum(std::span<const Symbol> sym, int q, std::span<const double> table);
double pair_gather_sum(std::span<const Symbol> sym, int q, std::span<const double> table, int m);
void convolve(std::span<const double> a, std::span<const double> b, std::span<double> out);

} // namespace multierg::kernels
