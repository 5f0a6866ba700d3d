#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "multierg/system_model.hpp"
#include "multierg/transfer.hpp"

namespace multierg {

/// One q-adic chain {start, start q, start q^2, ...} intersected with [1, n].
/// Positions are 1-based.
struct Chain {
    std::size_t start = 0;
    std::vector<std::size_t> entries;
};

struct ChainLayout {
    std::size_t n = 0;
    int q = 2;
    std::vector<Chain> chains; // ordered by start
};

ChainLayout chain_layout(std::size_t n, int q);

/// A word drawn from the telescopic product measure: one independent Markov
/// path per chain.
struct SampledWord {
    std::vector<Symbol> symbols;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

SampledWord sample_word(const MarkovKernel& kernel, const ChainLayout& layout, std::uint64_t seed,
                        std::uint64_t index = 0);

/// (1/N) sum_{k=1}^{N} phi(w_k, w_{qk}) with N = floor(n/q).
double multiple_average(std::span<const Symbol> word, const SystemSpec& spec);

/// Limit of the multiple average under the telescopic measure:
///   (1 - 1/q) sum_j q^{-j} sum_{a,b} (pi P^j)_a p_ab phi(a,b).
/// The series stops once max|phi| q^{-J} q/(q-1) < tol, or after max_depth
/// terms when max_depth >= 0.
double expected_phi(const MarkovKernel& kernel, const SystemSpec& spec, double tol = 1e-12, int max_depth = -1);

/// (1 - 1/q) sum_j q^{-j} <pi P^j, lambda>.
double expected_lyapunov(const MarkovKernel& kernel, const SystemSpec& spec, double tol = 1e-12,
                         int max_depth = -1);

/// Natural log of the telescopic measure of the cylinder fixed by `word`.
double cylinder_measure(const MarkovKernel& kernel, const ChainLayout& layout, std::span<const Symbol> word);

/// log P(C_n(w)) / log |pi(C_n(w))|.
double local_dimension_estimate(const SystemSpec& spec, const MarkovKernel& kernel, const ChainLayout& layout,
                                std::span<const Symbol> word);

struct SampleRecord {
    std::uint64_t sample_id = 0;
    std::size_t n = 0;
    double avg_phi = 0.0;
    double expected = 0.0;
    double log_measure = 0.0;
    double log_length = 0.0;
    double ratio = 0.0;
    double predicted = 0.0;
};

/// Draws `count` words (word i uses stream (seed, i)) and evaluates the
/// per-word statistics. Output order is by sample id regardless of threads.
std::vector<SampleRecord> sample_batch(const SystemSpec& spec, const MarkovKernel& kernel, const ChainLayout& layout,
                                       std::uint64_t seed, std::size_t count, double predicted_dim,
                                       unsigned threads = 1);

} // namespace multierg
