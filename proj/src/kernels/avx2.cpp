#include <immintrin.h>

#include <cstdint>
#include <cstring>

#include "kernels_impl.hpp"

namespace multierg::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m128i load4_u8(const Symbol* p) {
    std::int32_t raw;
    std::memcpy(&raw, p, sizeof(raw));
    return _mm_cvtepu8_epi32(_mm_cvtsi32_si128(raw));
}

inline __m128i strided4(const Symbol* sym, std::size_t q, std::size_t j) {
    // symbols at 1-based positions q*j, q*(j+1), q*(j+2), q*(j+3)
    return _mm_setr_epi32(sym[q * j - 1], sym[q * (j + 1) - 1], sym[q * (j + 2) - 1], sym[q * (j + 3) - 1]);
}

} // namespace

double gather_sum(const Symbol* sym, std::size_t n, const double* table) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_i32gather_pd(table, load4_u8(sym + k), 8));
        acc1 = _mm256_add_pd(acc1, _mm256_i32gather_pd(table, load4_u8(sym + k + 4), 8));
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) acc += table[sym[k]];
    return acc;
}

double strided_gather_sum(const Symbol* sym, std::size_t n, int q, const double* table) {
    const std::size_t uq = static_cast<std::size_t>(q);
    const std::size_t count = n / uq;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 1;
    for (; j + 3 <= count; j += 4) {
        acc = _mm256_add_pd(acc, _mm256_i32gather_pd(table, strided4(sym, uq, j), 8));
    }
    double out = hsum(acc);
    for (; j <= count; ++j) out += table[sym[uq * j - 1]];
    return out;
}

double pair_gather_sum(const Symbol* sym, std::size_t n, int q, const double* table, int m) {
    const std::size_t uq = static_cast<std::size_t>(q);
    const std::size_t count = n / uq;
    const __m128i vm = _mm_set1_epi32(m);
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 1;
    for (; k + 3 <= count; k += 4) {
        const __m128i first = load4_u8(sym + k - 1);
        const __m128i second = strided4(sym, uq, k);
        const __m128i idx = _mm_add_epi32(_mm_mullo_epi32(first, vm), second);
        acc = _mm256_add_pd(acc, _mm256_i32gather_pd(table, idx, 8));
    }
    double out = hsum(acc);
    for (; k <= count; ++k) out += table[sym[k - 1] * m + sym[uq * k - 1]];
    return out;
}

void convolve(const double* a, std::size_t na, const double* b, std::size_t nb, double* out) {
    const std::size_t nout = na + nb - 1;
    std::memset(out, 0, nout * sizeof(double));
    for (std::size_t i = 0; i < na; ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        const __m256d va = _mm256_set1_pd(ai);
        double* dst = out + i;
        std::size_t j = 0;
        for (; j + 4 <= nb; j += 4) {
            const __m256d vb = _mm256_loadu_pd(b + j);
            _mm256_storeu_pd(dst + j, _mm256_fmadd_pd(va, vb, _mm256_loadu_pd(dst + j)));
        }
        for (; j < nb; ++j) dst[j] += ai * b[j];
    }
}

} // namespace multierg::kernels::avx2
