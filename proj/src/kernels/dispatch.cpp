#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "kernels_impl.hpp"

namespace multierg::kernels {

namespace {

const KernelSet kScalar{"scalar", &scalar::gather_sum, &scalar::strided_gather_sum, &scalar::pair_gather_sum,
                        &scalar::convolve};

#if defined(MULTIERG_HAVE_AVX2)
const KernelSet kAvx2{"avx2", &avx2::gather_sum, &avx2::strided_gather_sum, &avx2::pair_gather_sum,
                      &avx2::convolve};
#endif

const KernelSet& select() {
    if (const char* env = std::getenv("MULTIERG_KERNELS"); env && std::string_view(env) == "scalar") {
        return kScalar;
    }
    if (const KernelSet* k = avx2_kernels()) return *k;
    return kScalar;
}

} // namespace

const KernelSet& scalar_kernels() { return kScalar; }

const KernelSet* avx2_kernels() {
#if defined(MULTIERG_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelSet& active() {
    static const KernelSet& chosen = select();
    return chosen;
}

double gather_sum(std::span<const Symbol> sym, std::span<const double> table) {
    return active().gather_sum(sym.data(), sym.size(), table.data());
}

double strided_gather_sum(std::span<const Symbol> sym, int q, std::span<const double> table) {
    return active().strided_gather_sum(sym.data(), sym.size(), q, table.data());
}

double pair_gather_sum(std::span<const Symbol> sym, int q, std::span<const double> table, int m) {
    return active().pair_gather_sum(sym.data(), sym.size(), q, table.data(), m);
}

void convolve(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    if (a.empty() || b.empty() || out.size() != a.size() + b.size() - 1) {
        throw std::invalid_argument("convolve: output must have size |a| + |b| - 1");
    }
    active().convolve(a.data(), a.size(), b.data(), b.size(), out.data());
}

} // namespace multierg::kernels
