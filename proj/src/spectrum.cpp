#include "multierg/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "multierg/errors.hpp"
#include "multierg/pressure.hpp"

namespace multierg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CriticalEval {
    double g1 = 0.0; // Pn - alpha s
    double g2 = 0.0; // dPn_ds - alpha
    double dPn_dr = 0.0;

    double merit() const { return g1 * g1 + g2 * g2; }
    double sup() const { return std::max(std::abs(g1), std::abs(g2)); }
};

bool evaluate(const SystemSpec& spec, double alpha, double s, double r, const TransferOptions& topts,
              CriticalEval& out) {
    try {
        const PressurePoint p = pressure_with_gradient(spec, s, r, topts);
        out.g1 = p.Pn - alpha * s;
        out.g2 = p.dPn_ds - alpha;
        out.dPn_dr = p.dPn_dr;
        return std::isfinite(out.g1) && std::isfinite(out.g2) && std::isfinite(out.dPn_dr);
    } catch (const ConvergenceError&) {
        return false;
    }
}

SpectrumPoint unconverged(const SystemSpec& spec, double alpha, double residual = kNaN) {
    SpectrumPoint p;
    p.alpha = alpha;
    p.s = kNaN;
    p.r = kNaN;
    p.dim = kNaN;
    p.paper_dim = kNaN;
    p.converged = false;
    p.newton_residual = residual;
    (void)spec;
    return p;
}

SpectrumPoint finish(const SystemSpec& spec, double alpha, double s, double r, double residual, int iterations) {
    SpectrumPoint p;
    p.alpha = alpha;
    p.s = s;
    p.r = r;
    p.dim = dimension_from_r(spec, r);
    p.paper_dim = paper_dimension_from_r(spec, r);
    p.converged = true;
    p.newton_residual = residual;
    p.iterations = iterations;
    return p;
}

// Continue from a converged point towards target, halving the step on failure.
SpectrumPoint continue_to(const SystemSpec& spec, const SpectrumPoint& from, double target,
                          const CriticalOptions& opts) {
    SpectrumPoint cur = from;
    double step = target - cur.alpha;
    if (step == 0.0) return solve_critical(spec, target, CriticalGuess{cur.s, cur.r}, opts);
    double last_residual = kNaN;
    while (true) {
        const double remaining = target - cur.alpha;
        if (std::abs(step) >= std::abs(remaining)) step = remaining;
        const double a = (step == remaining) ? target : cur.alpha + step;
        SpectrumPoint p = solve_critical(spec, a, CriticalGuess{cur.s, cur.r}, opts);
        if (p.converged) {
            cur = p;
            if (a == target) return cur;
            step *= 2.0;
        } else {
            last_residual = p.newton_residual;
            step *= 0.5;
            if (std::abs(step) < opts.min_continuation_step) return unconverged(spec, target, last_residual);
        }
    }
}

} // namespace

double dimension_from_r(const SystemSpec& spec, double r) { return -r / spec.q; }

double paper_dimension_from_r(const SystemSpec& spec, double r) {
    return r / (spec.q * std::log(static_cast<double>(spec.m)));
}

SpectrumPeak alpha_star(const SystemSpec& spec, const CriticalOptions& opts) {
    // Pn(0, .) is strictly increasing; Pn(0, 0) = q log m > 0 and
    // Pn(0, r) <= q log m + r min(lambda) < 0 below hi_bound.
    double hi = 0.0;
    double lo = -spec.q * std::log(static_cast<double>(spec.m)) / spec.lambda_min() - 1.0;
    double r = 0.5 * (lo + hi);
    PressurePoint best{};
    double best_abs = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        const PressurePoint p = pressure_with_gradient(spec, 0.0, r, opts.transfer);
        if (std::abs(p.Pn) < best_abs) {
            best_abs = std::abs(p.Pn);
            best = p;
        }
        if (std::abs(p.Pn) < 1e-15) break;
        if (p.Pn > 0.0) hi = r; else lo = r;
        double next = r - p.Pn / p.dPn_dr;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == r || hi - lo < 1e-15) break;
        r = next;
    }
    if (!(best_abs < 1e-12)) throw ConvergenceError("peak root-finding failed");
    SpectrumPeak out;
    out.r0 = best.r;
    // every summand of the expectation is c when phi is constant
    out.alpha_star = spec.phi_constant() ? spec.phi_min() : best.dPn_ds;
    out.dim0 = dimension_from_r(spec, best.r);
    return out;
}

SpectrumPoint solve_critical(const SystemSpec& spec, double alpha, std::optional<CriticalGuess> guess,
                             const CriticalOptions& opts) {
    if (spec.phi_constant()) {
        // Every level set but alpha = c is empty and s is free; report s = 0.
        const double c = spec.phi_min();
        if (std::abs(alpha - c) > 1e-12 * (1.0 + std::abs(c))) return unconverged(spec, alpha);
        const SpectrumPeak peak = alpha_star(spec, opts);
        return finish(spec, alpha, 0.0, peak.r0, 0.0, 0);
    }
    if (alpha < spec.phi_min() || alpha > spec.phi_max()) return unconverged(spec, alpha);

    double s = 0.0;
    double r = 0.0;
    if (guess) {
        s = guess->s;
        r = guess->r;
    } else {
        r = alpha_star(spec, opts).r0;
    }

    CriticalEval cur;
    if (!evaluate(spec, alpha, s, r, opts.transfer, cur)) return unconverged(spec, alpha);

    const double h = opts.jacobian_step;
    for (int it = 0; it < opts.max_iter; ++it) {
        if (cur.sup() < opts.tol) return finish(spec, alpha, s, r, cur.sup(), it);

        double j10 = 0.0;
        double j11 = 0.0;
        try {
            j10 = (pressure_gradient(spec, s + h, r, opts.transfer).ds -
                   pressure_gradient(spec, s - h, r, opts.transfer).ds) / (2 * h);
            j11 = (pressure_gradient(spec, s, r + h, opts.transfer).ds -
                   pressure_gradient(spec, s, r - h, opts.transfer).ds) / (2 * h);
        } catch (const ConvergenceError&) {
            return unconverged(spec, alpha, cur.sup());
        }
        const double j00 = cur.g2;
        const double j01 = cur.dPn_dr;
        const double det = j00 * j11 - j01 * j10;
        const double det_scale = std::abs(j00 * j11) + std::abs(j01 * j10);
        if (!std::isfinite(det) || std::abs(det) <= 1e-14 * det_scale || det_scale == 0.0) {
            return unconverged(spec, alpha, cur.sup());
        }
        double ds = -(j11 * cur.g1 - j01 * cur.g2) / det;
        double dr = -(-j10 * cur.g1 + j00 * cur.g2) / det;
        const double cap = 10.0;
        const double len = std::max(std::abs(ds), std::abs(dr));
        if (len > cap) {
            ds *= cap / len;
            dr *= cap / len;
        }

        bool accepted = false;
        double damp = 1.0;
        for (int k = 0; k < 40; ++k, damp *= 0.5) {
            const double ns = s + damp * ds;
            const double nr = r + damp * dr;
            if (std::max(std::abs(ns), std::abs(nr)) > opts.divergence_radius) continue;
            CriticalEval trial;
            if (!evaluate(spec, alpha, ns, nr, opts.transfer, trial)) continue;
            if (trial.merit() < cur.merit() || trial.sup() < opts.tol) {
                s = ns;
                r = nr;
                cur = trial;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (cur.sup() < opts.tol) return finish(spec, alpha, s, r, cur.sup(), it);
            return unconverged(spec, alpha, cur.sup());
        }
    }
    if (cur.sup() < opts.tol) return finish(spec, alpha, s, r, cur.sup(), opts.max_iter);
    return unconverged(spec, alpha, cur.sup());
}

std::vector<SpectrumPoint> spectrum_curve(const SystemSpec& spec, std::span<const double> alpha_grid,
                                          const CriticalOptions& opts) {
    std::vector<SpectrumPoint> out(alpha_grid.size());
    if (spec.phi_constant()) {
        for (std::size_t i = 0; i < alpha_grid.size(); ++i) out[i] = solve_critical(spec, alpha_grid[i], {}, opts);
        return out;
    }

    const SpectrumPeak peak = alpha_star(spec, opts);
    SpectrumPoint top = finish(spec, peak.alpha_star, 0.0, peak.r0, 0.0, 0);

    // Right of the peak, ascending.
    {
        SpectrumPoint cur = top;
        bool failed = false;
        for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
            const double a = alpha_grid[i];
            if (a < peak.alpha_star) continue;
            if (failed) {
                out[i] = unconverged(spec, a);
                continue;
            }
            out[i] = continue_to(spec, cur, a, opts);
            if (out[i].converged) cur = out[i]; else failed = true;
        }
    }
    // Left of the peak, descending.
    {
        SpectrumPoint cur = top;
        bool failed = false;
        for (std::size_t k = alpha_grid.size(); k-- > 0;) {
            const double a = alpha_grid[k];
            if (a >= peak.alpha_star) continue;
            if (failed) {
                out[k] = unconverged(spec, a);
                continue;
            }
            out[k] = continue_to(spec, cur, a, opts);
            if (out[k].converged) cur = out[k]; else failed = true;
        }
    }
    return out;
}

SupportEstimate estimate_support(const SystemSpec& spec, double tol, const CriticalOptions& opts) {
    SupportEstimate est;
    const double lo_bound = spec.phi_min();
    const double hi_bound = spec.phi_max();
    const SpectrumPeak peak = alpha_star(spec, opts);
    est.alpha_star = peak.alpha_star;

    if (spec.phi_constant()) {
        est.A = est.B = lo_bound;
        est.rA = est.rB = peak.r0;
        est.achieved_alphas = {lo_bound, lo_bound};
        return est;
    }

    const SpectrumPoint top = finish(spec, peak.alpha_star, 0.0, peak.r0, 0.0, 0);
    auto walk = [&](double direction, double bound) {
        SpectrumPoint cur = top;
        double step = (hi_bound - lo_bound) / 16.0;
        double bracket = step;
        while (step >= tol) {
            const double a = cur.alpha + direction * step;
            bool ok = false;
            if (direction > 0 ? a < bound : a > bound) {
                SpectrumPoint p = solve_critical(spec, a, CriticalGuess{cur.s, cur.r}, opts);
                if (p.converged) {
                    cur = p;
                    ok = true;
                }
            }
            if (!ok) {
                bracket = step;
                step *= 0.5;
            }
        }
        return std::pair{cur, bracket};
    };

    const auto [right, right_bracket] = walk(+1.0, hi_bound);
    const auto [left, left_bracket] = walk(-1.0, lo_bound);
    est.B = std::min(hi_bound, right.alpha + right_bracket);
    est.A = std::max(lo_bound, left.alpha - left_bracket);
    est.rB = right.r;
    est.rA = left.r;
    est.achieved_alphas = {left.alpha, right.alpha};
    return est;
}

} // namespace multierg
