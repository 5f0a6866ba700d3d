#include "multierg/transfer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "multierg/errors.hpp"

namespace multierg {

namespace detail {

double log_rhs(const SystemSpec& spec, std::span<const double> log_t, double s, double r, int i) {
    const int m = spec.m;
    const double base = r * spec.lambdas[i];
    double peak = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) peak = std::max(peak, s * spec.phi_at(i, j) + log_t[j]);
    double sum = 0.0;
    for (int j = 0; j < m; ++j) sum += std::exp(s * spec.phi_at(i, j) + log_t[j] - peak);
    return base + peak + std::log(sum);
}

} // namespace detail

namespace {

// |e^a - e^b| / max(1, e^a) evaluated without forming e^a.
double scaled_defect(double log_lhs, double log_rhs_value) {
    const double rel = std::abs(std::expm1(log_rhs_value - log_lhs));
    return log_lhs >= 0.0 ? rel : std::exp(log_lhs) * rel;
}

void newton_polish(const SystemSpec& spec, double s, double r, std::vector<double>& x, int steps) {
    const int m = spec.m;
    const double q = spec.q;
    Eigen::MatrixXd jac(m, m);
    Eigen::VectorXd f(m);
    for (int it = 0; it < steps; ++it) {
        for (int i = 0; i < m; ++i) {
            const double li = detail::log_rhs(spec, x, s, r, i);
            f(i) = q * x[i] - li;
            for (int j = 0; j < m; ++j) {
                const double w = std::exp(s * spec.phi_at(i, j) + r * spec.lambdas[i] + x[j] - li);
                jac(i, j) = (i == j ? q : 0.0) - w;
            }
        }
        const Eigen::VectorXd step = jac.partialPivLu().solve(f);
        for (int i = 0; i < m; ++i) x[i] -= step(i);
        if (step.lpNorm<Eigen::Infinity>() <= 4 * std::numeric_limits<double>::epsilon()) break;
    }
}

} // namespace

double log_residual(const SystemSpec& spec, std::span<const double> log_t, double s, double r) {
    double worst = 0.0;
    for (int i = 0; i < spec.m; ++i) {
        worst = std::max(worst, scaled_defect(spec.q * log_t[i], detail::log_rhs(spec, log_t, s, r, i)));
    }
    return worst;
}

double residual(const SystemSpec& spec, std::span<const double> t, double s, double r) {
    std::vector<double> x(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0)) throw std::invalid_argument("transfer residual needs strictly positive t");
        x[i] = std::log(t[i]);
    }
    return log_residual(spec, x, s, r);
}

TransferSolution solve_transfer(const SystemSpec& spec, double s, double r, const TransferOptions& opts,
                                std::span<const double> initial_log_t) {
    if (!(opts.tol > 0.0)) throw std::invalid_argument("transfer tolerance must be positive");
    const int m = spec.m;
    const double q = spec.q;

    std::vector<double> x(m, 0.0);
    if (!initial_log_t.empty()) std::copy(initial_log_t.begin(), initial_log_t.end(), x.begin());
    std::vector<double> next(m);

    TransferSolution sol;
    sol.s = s;
    sol.r = r;

    // The sweep is a 1/q contraction in the sup norm of log t; stop once the
    // update is below the target or has reached the rounding floor.
    const double target = opts.tol * 1e-2;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        double delta = 0.0;
        double scale = 1.0;
        for (int i = 0; i < m; ++i) {
            next[i] = detail::log_rhs(spec, x, s, r, i) / q;
            delta = std::max(delta, std::abs(next[i] - x[i]));
            scale = std::max(scale, std::abs(next[i]));
        }
        x.swap(next);
        if (delta < target || delta <= 8 * std::numeric_limits<double>::epsilon() * scale) {
            ++it;
            break;
        }
    }
    sol.iterations = it;

    double res = log_residual(spec, x, s, r);
    if (res > opts.tol || it >= opts.max_iter) {
        newton_polish(spec, s, r, x, 25);
        sol.newton_used = true;
        res = log_residual(spec, x, s, r);
    }
    if (!(res <= opts.tol)) {
        std::ostringstream os;
        os << "transfer system did not converge at (s, r) = (" << s << ", " << r << "): residual " << res
           << " after " << it << " iterations";
        throw ConvergenceError(os.str());
    }

    sol.residual = res;
    sol.log_t = x;
    sol.t.resize(m);
    for (int i = 0; i < m; ++i) sol.t[i] = std::exp(x[i]);
    return sol;
}

MarkovKernel transition_kernel(const SystemSpec& spec, const TransferSolution& solution) {
    const int m = spec.m;
    const double q = spec.q;
    const auto& x = solution.log_t;
    MarkovKernel k;
    k.m = m;

    const double peak = *std::max_element(x.begin(), x.end());
    double z = 0.0;
    for (double v : x) z += std::exp(v - peak);
    const double log_total = peak + std::log(z);
    k.log_initial.resize(m);
    k.initial.resize(m);
    for (int i = 0; i < m; ++i) {
        k.log_initial[i] = x[i] - log_total;
        k.initial[i] = std::exp(k.log_initial[i]);
    }

    k.log_transitions.resize(static_cast<std::size_t>(m) * m);
    k.transitions.resize(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * m + j;
            k.log_transitions[idx] = solution.s * spec.phi_at(i, j) + solution.r * spec.lambdas[i] + x[j] - q * x[i];
            k.transitions[idx] = std::exp(k.log_transitions[idx]);
        }
    }
    return k;
}

} // namespace multierg
