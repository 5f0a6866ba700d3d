#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "multierg/system_model.hpp"
#include "multierg/transfer.hpp"

namespace multierg {

enum class OracleMode { Dp, Exhaustive };

std::string_view to_string(OracleMode mode);

struct OracleOptions {
    OracleMode mode = OracleMode::Dp;
    std::size_t max_exhaustive_words = std::size_t{1} << 22;
    std::size_t max_bins = std::size_t{1} << 16; // cap on phi-sum bins of the full word
    double moran_tol = 1e-12;
};

/// Quantization of phi(a, b) - min(phi) onto an integer lattice of step `unit`.
/// `exact` is set when every entry is an integer multiple of the step.
struct PhiBinning {
    double unit = 1.0;
    bool exact = true;
    std::vector<long> pair_bins; // row-major m x m
    long max_pair_bin = 0;
};

PhiBinning phi_binning(const SystemSpec& spec, std::size_t n, std::size_t max_bins);

/// Weighted count of length-n words by phi-sum bin, each word weighted by
/// exp(-d * sum_k lambda_{w_k}). Stored tilted and rescaled: the weight of
/// bin b is weights[b] * exp(log_scale - tilt * b).
struct CountTable {
    std::size_t n = 0;
    double d = 0.0;
    double bin_width = 1.0;
    double phi_offset = 0.0; // phi-sum of bin 0, i.e. floor(n/q) * min(phi)
    double tilt = 0.0;
    double log_scale = 0.0;
    std::vector<double> weights;
    bool exact_bins = true;

    double log_weight(std::size_t b) const;
};

/// Per-chain DP over (last symbol, phi-sum bin), combined across the chains
/// of chain_layout(n, q) by convolution powers. The tilt is chosen so the
/// tilted mass centres on target_alpha, keeping the admissible window away
/// from underflow.
CountTable count_table(const SystemSpec& spec, std::size_t n, double d, double target_alpha,
                       const OracleOptions& opts = {});

struct LevelSetCount {
    std::size_t n = 0;
    double alpha = 0.0;
    double eps = 0.0;
    double count = 0.0;     // may be +inf for large n; log_count stays finite
    double log_count = 0.0; // -inf when nothing is admissible
    double moran_dim = 0.0;
    OracleMode mode = OracleMode::Dp;
    bool exact_bins = true;
};

/// Words w of length n with |multiple_average(w) - alpha| <= eps, and the root
/// d of sum_admissible prod_k exp(-d lambda_{w_k}) = 1.
LevelSetCount level_set_count(const SystemSpec& spec, std::size_t n, double alpha, double eps,
                              const OracleOptions& opts = {});

struct ExhaustiveCheck {
    std::size_t n = 0;
    double mass = 0.0;
    double expected_log_measure = 0.0;
    double model_value = 0.0;
    double constant = 0.0; // |expected - model| / sqrt(n)
};

/// Enumerates all m^n cylinders under the telescopic measure at (s, r).
/// Requires m^n <= 1e6.
ExhaustiveCheck exhaustive_check(const SystemSpec& spec, double s, double r, std::size_t n,
                                 const TransferOptions& topts = {});

} // namespace multierg
