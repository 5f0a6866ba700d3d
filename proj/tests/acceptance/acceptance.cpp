// Acceptance suite: one PASS/FAIL line per criterion, each with its runtime
// limit. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_harness.hpp"
#include "fixtures.hpp"
#include "multierg/oracle.hpp"
#include "multierg/pressure.hpp"
#include "multierg/spectrum.hpp"
#include "multierg/telescopic.hpp"
#include "multierg/transfer.hpp"
#include "oracles.hpp"

using namespace multierg;

namespace {

struct Verdict {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) detail << "first failure: " << what << "; ";
        ok = ok && cond;
    }
};

// fixed so results do not depend on the host; oversubscription is harmless
constexpr unsigned kWorkers = 4;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::vector<fixtures::Named> nonconstant_specs() {
    std::vector<fixtures::Named> out;
    for (auto& n : fixtures::all_specs())
        if (!n.spec.phi_constant()) out.push_back(n);
    return out;
}

void transfer_correctness(Verdict& v) {
    std::mt19937_64 eng(2024);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    double worst_res = 0.0, worst_spread = 0.0;
    for (const auto& [name, spec] : fixtures::grid_specs()) {
        for (double s : fixtures::linspace(-3, 3, 9)) {
            for (double r : fixtures::linspace(-3, 3, 9)) {
                const auto base = solve_transfer(spec, s, r);
                worst_res = std::max(worst_res, base.residual);
                for (double t : base.t) v.require(t > 0.0, name + " positivity");
                for (int k = 0; k < 10; ++k) {
                    std::vector<double> init(static_cast<std::size_t>(spec.m));
                    for (double& x : init) x = u(eng);
                    const auto sol = solve_transfer(spec, s, r, {}, init);
                    worst_res = std::max(worst_res, sol.residual);
                    for (int i = 0; i < spec.m; ++i)
                        worst_spread = std::max(worst_spread, std::fabs(sol.t[i] - base.t[i]) / base.t[i]);
                }
            }
        }
    }
    v.require(worst_res <= 1e-13, "residual " + fmt(worst_res));
    v.require(worst_spread <= 1e-12, "init spread " + fmt(worst_spread));
    v.detail << "max residual " << fmt(worst_res) << ", max relative spread over 10 inits " << fmt(worst_spread);
}

void stochasticity(Verdict& v) {
    double worst = 0.0;
    for (const auto& [name, spec] : fixtures::grid_specs()) {
        for (double s : fixtures::linspace(-3, 3, 9)) {
            for (double r : fixtures::linspace(-3, 3, 9)) {
                const auto k = transition_kernel(spec, solve_transfer(spec, s, r));
                double init = 0.0;
                for (int i = 0; i < spec.m; ++i) {
                    init += k.initial[i];
                    double row = 0.0;
                    for (int j = 0; j < spec.m; ++j) row += k.p(i, j);
                    worst = std::max(worst, std::fabs(row - 1.0));
                }
                worst = std::max(worst, std::fabs(init - 1.0));
            }
        }
    }
    v.require(worst <= 1e-12, "row sum error " + fmt(worst));
    v.detail << "max |row sum - 1| " << fmt(worst) << " (q = 2 and q = 3 specs)";
}

void gradient_convexity(Verdict& v) {
    double worst_rel = 0.0, min_eig_weak = INFINITY, min_eig_strict = INFINITY;
    auto specs = fixtures::grid_specs();
    specs.push_back({"golden_ij", fixtures::golden_ij()});
    for (const auto& [name, spec] : specs) {
        const bool strict = !spec.phi_constant() && spec.lambda_min() != spec.lambda_max();
        for (double s : fixtures::linspace(-3, 3, 9)) {
            for (double r : fixtures::linspace(-3, 3, 9)) {
                const auto g = pressure_gradient(spec, s, r);
                const auto [fs, fr] = oracle::fd_gradient(spec, s, r);
                worst_rel = std::max({worst_rel, std::fabs(g.ds - fs) / (1 + std::fabs(g.ds)),
                                      std::fabs(g.dr - fr) / (1 + std::fabs(g.dr))});
                const double e = pressure_hessian(spec, s, r).eigen_min();
                v.require(e >= -1e-8, name + " eigenvalue " + fmt(e));
                if (strict) {
                    v.require(e > 0.0, name + " strict convexity");
                    min_eig_strict = std::min(min_eig_strict, e);
                } else {
                    min_eig_weak = std::min(min_eig_weak, e);
                }
            }
        }
    }
    v.require(worst_rel < 1e-6, "gradient rel err " + fmt(worst_rel));
    v.detail << "gradient rel err " << fmt(worst_rel) << ", min eig (equal lambdas) " << fmt(min_eig_weak)
             << ", min eig (distinct lambdas) " << fmt(min_eig_strict);
}

void normalization(Verdict& v) {
    double worst = 0.0;
    const std::vector<SystemSpec> specs{fixtures::symbolic_ij(), fixtures::golden_ij(), fixtures::ternary(),
                                        fixtures::binary_q3()};
    for (const auto& spec : specs) {
        for (double s : fixtures::linspace(-2, 2, 5)) {
            for (double r : fixtures::linspace(-2, 2, 5)) {
                const auto sol = solve_transfer(spec, s, r);
                const double phi = expected_phi(transition_kernel(spec, sol), spec);
                worst = std::max(worst, std::fabs(phi - gradient_at(spec, sol).ds));
            }
        }
    }
    v.require(worst < 1e-10, "identity gap " + fmt(worst));
    v.detail << "max |expected_phi - dPn/ds| " << fmt(worst) << " (q = 2, 3)";
}

void hand_critical(Verdict& v) {
    const auto p = solve_critical(fixtures::symbolic_ij(), 0.25);
    v.require(p.converged, "converged");
    v.require(std::fabs(p.s) < 1e-8, "s");
    v.require(std::fabs(p.r + 2) < 1e-8, "r");
    v.require(std::fabs(p.dim - 1) < 1e-8, "dim");
    v.detail << "s " << fmt(p.s) << ", r + 2 " << fmt(p.r + 2) << ", dim - 1 " << fmt(p.dim - 1);
}

void bowen_calibration(Verdict& v) {
    double worst = 0.0;
    for (const auto& [name, spec] : fixtures::all_specs()) {
        const auto pk = alpha_star(spec);
        const auto p = solve_critical(spec, pk.alpha_star);
        v.require(p.converged, name + " converged");
        worst = std::max(worst, std::fabs(p.dim - bowen_dimension(spec.lambdas)));
    }
    const double g = solve_critical(fixtures::golden_ij(), alpha_star(fixtures::golden_ij()).alpha_star).dim;
    v.require(worst < 1e-9, "calibration " + fmt(worst));
    v.require(std::fabs(g - 0.694242) < 1e-6, "golden value");
    v.require(std::fabs(g - oracle::golden_bowen()) < 1e-9, "golden closed form");
    v.detail << "max |dim(alpha*) - bowen| " << fmt(worst) << " over " << fixtures::all_specs().size()
             << " specs, golden dim " << g;
}

void support(Verdict& v) {
    for (const auto& spec : {fixtures::symbolic_ij(), fixtures::golden_ij()}) {
        const auto sup = estimate_support(spec);
        v.require(std::fabs(sup.A) < 0.02 && std::fabs(sup.B - 1) < 0.02, "(A,B) = (0,1)");
        v.detail << "(A,B) = (" << fmt(sup.A) << ", " << fmt(sup.B) << ") ";
    }
    for (const auto& [name, spec] : fixtures::all_specs()) {
        const auto sup = estimate_support(spec);
        v.require(sup.A >= spec.phi_min() - 1e-9 && sup.B <= spec.phi_max() + 1e-9, name + " phi range");
        v.require(sup.A <= sup.alpha_star && sup.alpha_star <= sup.B, name + " alpha* inside");
    }
    v.detail << "; phi-range bounds hold for " << fixtures::all_specs().size() << " specs";
}

void lln(Verdict& v) {
    struct Case {
        std::string name;
        SystemSpec spec;
        double s, r;
    };
    const auto g = solve_critical(fixtures::golden_ij(), 0.3);
    const auto b = solve_critical(fixtures::binary_q3(), alpha_star(fixtures::binary_q3()).alpha_star);
    const std::vector<Case> cases{{"golden_ij critical 0.3", fixtures::golden_ij(), g.s, g.r},
                                  {"binary_q3 peak", fixtures::binary_q3(), b.s, b.r},
                                  {"ternary (0.5,-1)", fixtures::ternary(), 0.5, -1.0}};
    for (const auto& c : cases) {
        const auto k = transition_kernel(c.spec, solve_transfer(c.spec, c.s, c.r));
        const auto recs = sample_batch(c.spec, k, chain_layout(100000, c.spec.q), 11, 200, 0.0, kWorkers);
        double mean = 0.0;
        for (const auto& r : recs) mean += r.avg_phi;
        mean /= recs.size();
        double var = 0.0;
        for (const auto& r : recs) var += (r.avg_phi - mean) * (r.avg_phi - mean);
        const double se = std::sqrt(var / (recs.size() - 1)) / std::sqrt(static_cast<double>(recs.size()));
        const double z = std::fabs(mean - expected_phi(k, c.spec)) / se;
        v.require(z <= 4.0, c.name + " z " + fmt(z));
        v.detail << c.name << ": z " << fmt(z) << "; ";
    }
}

void local_dimension(Verdict& v) {
    for (const auto& [name, spec] : {fixtures::Named{"symbolic_ij", fixtures::symbolic_ij()},
                                     fixtures::Named{"golden_ij", fixtures::golden_ij()}}) {
        const double top = alpha_star(spec).alpha_star;
        for (double a : {top - 0.05, top, top + 0.05}) {
            const auto p = solve_critical(spec, a);
            v.require(p.converged, name + " converged");
            const auto k = transition_kernel(spec, solve_transfer(spec, p.s, p.r));
            const auto recs = sample_batch(spec, k, chain_layout(100000, spec.q), 21, 200, p.dim, kWorkers);
            std::vector<double> ratios;
            for (const auto& r : recs) ratios.push_back(r.ratio);
            std::sort(ratios.begin(), ratios.end());
            const double med = 0.5 * (ratios[99] + ratios[100]);
            v.require(std::fabs(med - p.dim) < 0.05, name + " alpha " + fmt(a));
            v.detail << name << "@" << fmt(a) << " |med-dim| " << fmt(std::fabs(med - p.dim)) << "; ";
        }
    }
}

void oracle_cross_validation(Verdict& v) {
    const SystemSpec spec = fixtures::symbolic_ij();
    double worst = 0.0;
    for (double a : {0.05, 0.15, 0.25, 0.35, 0.45}) {
        const auto p = solve_critical(spec, a);
        v.require(p.converged, "spectrum at " + fmt(a));
        const auto c = level_set_count(spec, 4096, a, 0.005);
        worst = std::max(worst, std::fabs(c.moran_dim - p.dim));
    }
    v.require(worst < 0.1, "depth 4096 gap " + fmt(worst));
    OracleOptions dp, ex;
    ex.mode = OracleMode::Exhaustive;
    double moran_gap = 0.0;
    for (double a : {0.0, 0.1, 0.25, 0.4, 0.75}) {
        const auto x = level_set_count(spec, 14, a, 0.05, dp);
        const auto y = level_set_count(spec, 14, a, 0.05, ex);
        v.require(x.exact_bins && std::round(x.count) == y.count, "count at " + fmt(a));
        moran_gap = std::max(moran_gap, std::fabs(x.moran_dim - y.moran_dim));
    }
    v.require(moran_gap < 1e-10, "n=14 moran gap " + fmt(moran_gap));
    v.detail << "max |moran - dim| at depth 4096 " << fmt(worst) << "; n = 14 counts equal, moran gap "
             << fmt(moran_gap);
}

void unimodality(Verdict& v) {
    for (const auto& [name, spec] : nonconstant_specs()) {
        const auto pk = alpha_star(spec);
        const auto sup = estimate_support(spec);
        std::vector<double> grid{pk.alpha_star};
        for (int i = 1; i < 40; ++i) {
            const double a = sup.A + (sup.B - sup.A) * i / 40;
            if (std::fabs(a - pk.alpha_star) > 1e-6) grid.push_back(a);
        }
        std::sort(grid.begin(), grid.end());
        const auto pts = spectrum_curve(spec, grid);
        std::size_t peak = 0;
        std::size_t used = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (!pts[i].converged) continue;
            ++used;
            if (pts[i].dim > pts[peak].dim || !pts[peak].converged) peak = i;
        }
        v.require(used == pts.size(), name + " all converged");
        v.require(std::fabs(pts[peak].s) < 1e-8, name + " s at peak");
        v.require(pts[peak].alpha == pk.alpha_star, name + " peak at alpha*");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i < peak) v.require(pts[i].dim <= pts[i + 1].dim + 1e-12 && pts[i].s < 0, name + " left side");
            if (i > peak) v.require(pts[i].dim <= pts[i - 1].dim + 1e-12 && pts[i].s > 0, name + " right side");
        }
    }
    v.detail << "checked " << nonconstant_specs().size() << " specs on 40-point grids";
}

void determinism(Verdict& v) {
    harness::TempDir dir;
    const auto cfg = harness::write_json(dir.path(), "config.json", harness::symbolic_config());
    auto run = [&](const std::string& cmd, const std::string& out, const std::string& threads) {
        return harness::run({cmd, "--config", cfg.string(), "--out", (dir.path() / out).string(), "--threads", threads,
                             "--n", "100000", "--samples", "50"});
    };
    for (const char* cmd : {"spectrum", "sample"}) {
        v.require(run(cmd, "a", "1").code == 0, std::string(cmd) + " run a");
        v.require(run(cmd, "b", "1").code == 0, std::string(cmd) + " run b");
        v.require(run(cmd, "c", std::to_string(kWorkers)).code == 0, std::string(cmd) + " run c");
    }
    for (const char* f : {"spectrum.csv", "samples.csv"}) {
        const auto a = harness::slurp(dir.path() / "a" / f);
        v.require(!a.empty(), std::string(f) + " nonempty");
        v.require(a == harness::slurp(dir.path() / "b" / f), std::string(f) + " rerun");
        v.require(a == harness::slurp(dir.path() / "c" / f), std::string(f) + " threads");
    }
    v.detail << "spectrum.csv and samples.csv identical across 2 reruns and 1 vs " << kWorkers << " threads";
}

struct Criterion {
    int id;
    const char* title;
    double limit_s;
    std::function<void(Verdict&)> body;
};

} // namespace

int main() {
    const std::vector<Criterion> all{
        {1, "transfer correctness", 5, transfer_correctness},
        {2, "stochasticity", 5, stochasticity},
        {3, "gradient and convexity", 30, gradient_convexity},
        {4, "normalization identity", 10, normalization},
        {5, "hand-derived critical point", 1, hand_critical},
        {6, "Bowen calibration", 1, bowen_calibration},
        {7, "support", 30, support},
        {8, "law of large numbers", 60, lln},
        {9, "local dimension", 120, local_dimension},
        {10, "oracle cross-validation", 600, oracle_cross_validation},
        {11, "unimodality and peak", 30, unimodality},
        {12, "determinism", 10, determinism},
    };
    int failures = 0;
    for (const auto& c : all) {
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(v);
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        v.require(secs < c.limit_s, "runtime over limit");
        if (!v.ok) ++failures;
        std::printf("[%s] AC%02d %s (%.2f s, limit %.0f s): %s\n", v.ok ? "PASS" : "FAIL", c.id, c.title, secs,
                    c.limit_s, v.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failures, all.size());
    return failures == 0 ? 0 : 1;
}
