#pragma once

#include <optional>
#include <span>
#include <vector>

#include "multierg/system_model.hpp"
#include "multierg/transfer.hpp"

namespace multierg {

/// One solution of the critical system
///   Pn(s, r) = alpha * s,   dPn/ds(s, r) = alpha.
/// dim = -r / q is the reported dimension; paper_dim = r / (q log m) is kept
/// alongside as the alternative log-m normalization.
struct SpectrumPoint {
    double alpha = 0.0;
    double s = 0.0;
    double r = 0.0;
    double dim = 0.0;
    double paper_dim = 0.0;
    bool converged = false;
    double newton_residual = 0.0;
    int iterations = 0;
};

/// Top of the spectrum: the s = 0 solution.
struct SpectrumPeak {
    double alpha_star = 0.0;
    double r0 = 0.0;
    double dim0 = 0.0;
};

struct SupportEstimate {
    double A = 0.0;
    double B = 0.0;
    double rA = 0.0;
    double rB = 0.0;
    double alpha_star = 0.0;
    std::vector<double> achieved_alphas; // last converged levels: {left, right}
    bool approximate = true;
};

struct CriticalOptions {
    double tol = 1e-10;
    int max_iter = 80;
    double divergence_radius = 1e3;
    double jacobian_step = 1e-5;
    double min_continuation_step = 1e-4;
    TransferOptions transfer;
};

struct CriticalGuess {
    double s = 0.0;
    double r = 0.0;
};

SpectrumPeak alpha_star(const SystemSpec& spec, const CriticalOptions& opts = {});

/// Damped 2D Newton on the critical system with the exact first row and a
/// finite-difference second row. Starts from guess, or from the spectrum peak.
/// Divergence, a singular Jacobian or iteration exhaustion yield
/// converged = false; nothing is thrown.
SpectrumPoint solve_critical(const SystemSpec& spec, double alpha, std::optional<CriticalGuess> guess = std::nullopt,
                             const CriticalOptions& opts = {});

/// Continuation outward from alpha_star in both directions over a sorted
/// grid. Once a direction fails, every further level on that side is flagged.
std::vector<SpectrumPoint> spectrum_curve(const SystemSpec& spec, std::span<const double> alpha_grid,
                                          const CriticalOptions& opts = {});

/// Walks alpha away from alpha_star with halving steps until Newton no longer
/// converges and the step drops below tol. Bounds are clamped to
/// [min phi, max phi].
SupportEstimate estimate_support(const SystemSpec& spec, double tol = 1e-4, const CriticalOptions& opts = {});

double dimension_from_r(const SystemSpec& spec, double r);
double paper_dimension_from_r(const SystemSpec& spec, double r);

} // namespace multierg
