#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace multierg {

using Symbol = std::uint8_t;
inline constexpr int kMaxBranches = 256;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
};

/// A linear cookie-cutter system together with a locally constant potential
/// phi(i, j) on pairs of branch symbols.
///
/// Branch i maps I_i onto [0,1] with slope exp(lambdas[i]), so
/// lambdas[i] = -log |I_i| (natural log).
struct SystemSpec {
    int m = 0;
    int q = 0;
    int ell = 2;
    std::vector<Interval> intervals;
    std::vector<double> lambdas;
    std::vector<double> phi; // row-major m x m

    double phi_at(int i, int j) const { return phi[static_cast<std::size_t>(i) * m + j]; }
    double phi_min() const;
    double phi_max() const;
    bool phi_constant() const { return phi_min() == phi_max(); }
    double lambda_min() const;
    double lambda_max() const;
};

/// Unvalidated system description as read from a config file. Either
/// intervals or lambdas (or both) must be present.
struct RawSystem {
    std::optional<int> m;
    int q = 0;
    int ell = 2;
    std::optional<std::vector<std::array<double, 2>>> intervals;
    std::optional<std::vector<double>> lambdas;
    std::vector<std::vector<double>> phi;
};

/// Validates and normalizes a raw description. Throws SpecError naming every
/// violated constraint.
SystemSpec validate_spec(const RawSystem& raw);

/// lambda_i = -log(v_i - u_i). Throws SpecError on a zero-length interval.
std::vector<double> derive_lambdas(std::span<const Interval> intervals);

/// Lays intervals of length exp(-lambda_i) left to right, starting at 0 and
/// ending at 1, with equal gaps between consecutive intervals.
std::vector<Interval> synthesize_intervals(std::span<const double> lambdas);

struct CylinderInterval {
    Interval interval;
    double length = 1.0;
    double log_length = 0.0; // exact sum of -lambda, valid even when length underflows
};

/// Image of [0,1] under f_{w_1} o ... o f_{w_n}, i.e. the set of coded points
/// pi(omega) for omega extending the prefix.
CylinderInterval code_point(const SystemSpec& spec, std::span<const Symbol> prefix);

/// Root d > 0 of sum_i exp(-d lambda_i) = 1.
double bowen_dimension(std::span<const double> lambdas);

} // namespace multierg
