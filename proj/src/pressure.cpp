#include "multierg/pressure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "multierg/errors.hpp"

namespace multierg {

namespace {

double log_sum(std::span<const double> x) {
    const double peak = *std::max_element(x.begin(), x.end());
    double z = 0.0;
    for (double v : x) z += std::exp(v - peak);
    return peak + std::log(z);
}

} // namespace

double Hessian2::eigen_min() const {
    const double mid = 0.5 * (ss + rr);
    const double rad = std::hypot(0.5 * (ss - rr), sr);
    return mid - rad;
}

double Hessian2::eigen_max() const {
    const double mid = 0.5 * (ss + rr);
    const double rad = std::hypot(0.5 * (ss - rr), sr);
    return mid + rad;
}

PressurePoint pressure(const SystemSpec& spec, double s, double r, const TransferOptions& opts) {
    const TransferSolution sol = solve_transfer(spec, s, r, opts);
    PressurePoint p;
    p.s = s;
    p.r = r;
    p.P = log_sum(sol.log_t);
    p.Pn = (spec.q - 1) * p.P;
    return p;
}

PressureGradient gradient_at(const SystemSpec& spec, const TransferSolution& sol) {
    // In x = log t the system reads q x_i = L_i(x); differentiating gives
    // (q I - W) dx = b with W_ij = p_ij the kernel transitions and
    // b_i = sum_j p_ij da_ij. Then dP = <pi, dx>.
    const int m = spec.m;
    const MarkovKernel k = transition_kernel(spec, sol);
    Eigen::MatrixXd a(m, m);
    Eigen::VectorXd bs(m), br(m);
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) {
            a(i, j) = (i == j ? spec.q : 0.0) - k.p(i, j);
            acc += k.p(i, j) * spec.phi_at(i, j);
        }
        bs(i) = acc;
        br(i) = spec.lambdas[i];
    }
    const auto lu = a.partialPivLu();
    const Eigen::VectorXd dxs = lu.solve(bs);
    const Eigen::VectorXd dxr = lu.solve(br);
    if (!dxs.allFinite() || !dxr.allFinite()) {
        throw ConvergenceError("singular implicit-differentiation system");
    }
    PressureGradient g;
    for (int i = 0; i < m; ++i) {
        g.ds += k.initial[i] * dxs(i);
        g.dr += k.initial[i] * dxr(i);
    }
    g.ds *= spec.q - 1;
    g.dr *= spec.q - 1;
    return g;
}

PressureGradient pressure_gradient(const SystemSpec& spec, double s, double r, const TransferOptions& opts) {
    return gradient_at(spec, solve_transfer(spec, s, r, opts));
}

PressurePoint pressure_with_gradient(const SystemSpec& spec, double s, double r, const TransferOptions& opts) {
    const TransferSolution sol = solve_transfer(spec, s, r, opts);
    PressurePoint p;
    p.s = s;
    p.r = r;
    p.P = log_sum(sol.log_t);
    p.Pn = (spec.q - 1) * p.P;
    const PressureGradient g = gradient_at(spec, sol);
    p.dPn_ds = g.ds;
    p.dPn_dr = g.dr;
    return p;
}

Hessian2 pressure_hessian(const SystemSpec& spec, double s, double r, const TransferOptions& opts, double step) {
    const PressureGradient sp = pressure_gradient(spec, s + step, r, opts);
    const PressureGradient sm = pressure_gradient(spec, s - step, r, opts);
    const PressureGradient rp = pressure_gradient(spec, s, r + step, opts);
    const PressureGradient rm = pressure_gradient(spec, s, r - step, opts);
    Hessian2 h;
    h.ss = (sp.ds - sm.ds) / (2 * step);
    h.rr = (rp.dr - rm.dr) / (2 * step);
    const double sr_a = (rp.ds - rm.ds) / (2 * step);
    const double sr_b = (sp.dr - sm.dr) / (2 * step);
    h.sr = 0.5 * (sr_a + sr_b);
    h.asymmetry = std::abs(sr_a - sr_b);
    return h;
}

} // namespace multierg
