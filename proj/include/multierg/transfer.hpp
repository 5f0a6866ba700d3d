#pragma once

#include <span>
#include <vector>

#include "multierg/system_model.hpp"

namespace multierg {

struct TransferOptions {
    double tol = 1e-13;    // bound on the scaled residual
    int max_iter = 10000;  // fixed-point sweeps before the Newton fallback
};

/// Strictly positive solution of t_i^q = sum_j exp(s phi(i,j) + r lambda_i) t_j.
///
/// The solver works with log_t; t is exp(log_t) and may overflow to +inf for
/// very large |s|, |r| while log_t stays exact.
struct TransferSolution {
    double s = 0.0;
    double r = 0.0;
    std::vector<double> t;
    std::vector<double> log_t;
    double residual = 0.0;
    int iterations = 0;
    bool newton_used = false;
};

/// Markov measure induced by a transfer solution.
///   initial[i]          = t_i / sum_j t_j
///   transitions[i*m+j]  = exp(s phi(i,j) + r lambda_i) t_j / t_i^q
struct MarkovKernel {
    int m = 0;
    std::vector<double> initial;
    std::vector<double> transitions;
    std::vector<double> log_initial;
    std::vector<double> log_transitions;

    double p(int i, int j) const { return transitions[static_cast<std::size_t>(i) * m + j]; }
};

/// Fixed-point iteration x <- (1/q) logsumexp_j(a_ij + x_j) on x = log t,
/// starting from initial_log_t (or t = 1), with a Newton fallback.
/// Throws ConvergenceError if the residual bound cannot be met.
TransferSolution solve_transfer(const SystemSpec& spec, double s, double r, const TransferOptions& opts = {},
                                std::span<const double> initial_log_t = {});

/// max_i |t_i^q - sum_j e^{s phi(i,j) + r lambda_i} t_j| / max(1, t_i^q).
/// Throws std::invalid_argument on a nonpositive entry.
double residual(const SystemSpec& spec, std::span<const double> t, double s, double r);

/// Same defect measured from log t.
double log_residual(const SystemSpec& spec, std::span<const double> log_t, double s, double r);

MarkovKernel transition_kernel(const SystemSpec& spec, const TransferSolution& solution);

namespace detail {
/// log of the right-hand side: logsumexp_j(s phi(i,j) + r lambda_i + x_j).
double log_rhs(const SystemSpec& spec, std::span<const double> log_t, double s, double r, int i);
}

} // namespace multierg
