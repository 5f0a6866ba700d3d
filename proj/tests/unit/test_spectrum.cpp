#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "multierg/pressure.hpp"
#include "multierg/spectrum.hpp"
#include "oracles.hpp"

using namespace multierg;

namespace {

void check_critical(const SystemSpec& spec, const SpectrumPoint& p) {
    REQUIRE(p.converged);
    const auto pp = pressure_with_gradient(spec, p.s, p.r);
    CHECK(std::fabs(pp.Pn - p.alpha * p.s) <= 1e-10);
    CHECK(std::fabs(pp.dPn_ds - p.alpha) <= 1e-10);
    CHECK(p.dim == doctest::Approx(-p.r / spec.q).epsilon(1e-15));
    CHECK(p.dim >= 0.0);
    CHECK(p.dim <= bowen_dimension(spec.lambdas) + 1e-8);
    CHECK(p.paper_dim == doctest::Approx(p.r / (spec.q * std::log(spec.m))));
}

} // namespace

TEST_CASE("alpha_star: symbolic system") {
    const auto pk = alpha_star(fixtures::symbolic_ij());
    CHECK(pk.alpha_star == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(pk.r0 == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(pk.dim0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("alpha_star: golden-ratio closed form") {
    const auto pk = alpha_star(fixtures::golden_ij());
    CHECK(pk.r0 == doctest::Approx(oracle::golden_r0()).epsilon(1e-12));
    CHECK(std::fabs(pk.r0 - (-1.388484)) < 1e-6);
    CHECK(pk.dim0 == doctest::Approx(oracle::golden_bowen()).epsilon(1e-12));
    CHECK(pk.alpha_star == doctest::Approx(oracle::golden_alpha_star()).epsilon(1e-12));
    CHECK(std::fabs(pk.alpha_star - 0.145898) < 1e-6);
}

TEST_CASE("alpha_star: constant phi and Bowen calibration") {
    const SystemSpec c = fixtures::constant(0.7, {{0.0, 0.5}, {0.75, 1.0}}, 2);
    const auto pk = alpha_star(c);
    CHECK(pk.alpha_star == doctest::Approx(0.7).epsilon(1e-13));
    for (const auto& [name, spec] : fixtures::all_specs()) {
        CAPTURE(name);
        CHECK(std::fabs(alpha_star(spec).dim0 - bowen_dimension(spec.lambdas)) < 1e-9);
    }
}

TEST_CASE("solve_critical: hand-derived symbolic point") {
    const SystemSpec spec = fixtures::symbolic_ij();
    const auto p = solve_critical(spec, 0.25);
    CHECK(p.converged);
    CHECK(std::fabs(p.s) < 1e-8);
    CHECK(std::fabs(p.r + 2.0) < 1e-8);
    CHECK(std::fabs(p.dim - 1.0) < 1e-8);
    check_critical(spec, p);
}

TEST_CASE("solve_critical: constant phi") {
    const SystemSpec c = fixtures::constant(0.7, {{0.0, 0.5}, {0.75, 1.0}}, 2);
    const auto p = solve_critical(c, 0.7);
    CHECK(p.converged);
    CHECK(std::fabs(p.dim - 0.694242) < 1e-6);
    CHECK(p.dim == doctest::Approx(oracle::golden_bowen()).epsilon(1e-12));
    CHECK_FALSE(solve_critical(c, 0.8).converged);
}

TEST_CASE("solve_critical: alpha = 0.2 lies below the peak") {
    const SystemSpec spec = fixtures::symbolic_ij();
    const auto p = solve_critical(spec, 0.2);
    check_critical(spec, p);
    CHECK(p.dim < 1.0);
    CHECK(p.dim < solve_critical(spec, 0.25).dim);
}

TEST_CASE("solve_critical agrees with constraint-curve minimization") {
    struct Case {
        SystemSpec spec;
        double alpha;
    };
    const std::vector<Case> cases{{fixtures::symbolic_ij(), 0.2},  {fixtures::symbolic_ij(), 0.4},
                                  {fixtures::golden_ij(), 0.1},    {fixtures::golden_ij(), 0.3},
                                  {fixtures::ternary(), 0.2},      {fixtures::binary_q3(), 0.15}};
    for (const auto& c : cases) {
        CAPTURE(c.alpha);
        const auto p = solve_critical(c.spec, c.alpha);
        check_critical(c.spec, p);
        const auto mn = oracle::constraint_curve_minimum(c.spec, c.alpha, p.s - 6.0, p.s + 6.0);
        CHECK(std::fabs(mn.dim - p.dim) < 1e-8);
        CHECK(std::fabs(mn.s - p.s) < 1e-3);
    }
}

TEST_CASE("solve_critical is independent of the warm start") {
    const SystemSpec spec = fixtures::golden_ij();
    const auto base = solve_critical(spec, 0.3);
    REQUIRE(base.converged);
    for (auto g : {CriticalGuess{0.0, 0.0}, CriticalGuess{1.0, -1.0}, CriticalGuess{base.s + 0.5, base.r - 0.3},
                   CriticalGuess{base.s - 0.4, base.r + 0.2}, CriticalGuess{2.0, -1.5}}) {
        const auto p = solve_critical(spec, 0.3, g);
        REQUIRE(p.converged);
        CHECK(std::fabs(p.s - base.s) < 1e-8);
        CHECK(std::fabs(p.r - base.r) < 1e-8);
    }
}

TEST_CASE("spectrum_curve: constant phi single point") {
    const SystemSpec c = fixtures::constant(0.7, {{0.0, 0.5}, {0.75, 1.0}}, 2);
    std::vector<double> grid{0.7};
    const auto pts = spectrum_curve(c, grid);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].converged);
    CHECK(pts[0].dim == doctest::Approx(bowen_dimension(c.lambdas)).epsilon(1e-12));
}

TEST_CASE("spectrum_curve: symbolic grid 0.05..0.95") {
    const SystemSpec spec = fixtures::symbolic_ij();
    std::vector<double> grid;
    for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * k);
    const auto pts = spectrum_curve(spec, grid);
    REQUIRE(pts.size() == grid.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CAPTURE(pts[i].alpha);
        check_critical(spec, pts[i]);
        if (pts[i].dim > pts[best].dim) best = i;
    }
    CHECK(pts[best].alpha == doctest::Approx(0.25));
    CHECK(pts[best].dim == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::fabs(pts[best].s) < 1e-8);
}

TEST_CASE("spectrum_curve flags levels outside the phi range") {
    const SystemSpec spec = fixtures::symbolic_ij();
    std::vector<double> grid{-0.2, 0.1, 0.25, 0.6, 1.1, 1.5};
    const auto pts = spectrum_curve(spec, grid);
    CHECK_FALSE(pts[0].converged);
    CHECK(pts[1].converged);
    CHECK(pts[2].converged);
    CHECK(pts[3].converged);
    CHECK_FALSE(pts[4].converged);
    CHECK_FALSE(pts[5].converged);
    CHECK(std::isnan(pts[4].dim));
}

TEST_CASE("spectrum is unimodal with s = 0 at the peak and constant sign of s on each side") {
    for (const auto& [name, spec] : fixtures::all_specs()) {
        if (spec.phi_constant()) continue;
        CAPTURE(name);
        const auto pk = alpha_star(spec);
        const auto sup = estimate_support(spec);
        std::vector<double> grid;
        const int k = 31;
        for (int i = 1; i < k; ++i) {
            const double a = sup.A + (sup.B - sup.A) * i / k;
            if (std::fabs(a - pk.alpha_star) > 1e-6) grid.push_back(a);
        }
        grid.push_back(pk.alpha_star);
        std::sort(grid.begin(), grid.end());
        const auto pts = spectrum_curve(spec, grid);
        std::size_t peak = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            REQUIRE(pts[i].converged);
            if (pts[i].dim > pts[peak].dim) peak = i;
        }
        CHECK(pts[peak].alpha == doctest::Approx(pk.alpha_star).epsilon(1e-12));
        CHECK(std::fabs(pts[peak].s) < 1e-8);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i < peak) {
                CHECK(pts[i].dim <= pts[i + 1].dim + 1e-12);
                CHECK(pts[i].s < 0.0);
            } else if (i > peak) {
                CHECK(pts[i].dim <= pts[i - 1].dim + 1e-12);
                CHECK(pts[i].s > 0.0);
            }
        }
    }
}

TEST_CASE("estimate_support examples") {
    for (const auto& spec : {fixtures::symbolic_ij(), fixtures::golden_ij(), fixtures::first_coordinate()}) {
        const auto sup = estimate_support(spec);
        CHECK(std::fabs(sup.A - 0.0) < 0.02);
        CHECK(std::fabs(sup.B - 1.0) < 0.02);
        CHECK(sup.A <= sup.alpha_star);
        CHECK(sup.alpha_star <= sup.B);
        CHECK(sup.A >= spec.phi_min() - 1e-9);
        CHECK(sup.B <= spec.phi_max() + 1e-9);
        CHECK(sup.approximate);
        REQUIRE(sup.achieved_alphas.size() == 2);
        CHECK(sup.rA < 0.0);
        CHECK(sup.rB <= 0.0);
    }
    const SystemSpec c = fixtures::constant(0.7, {{0.0, 0.5}, {0.75, 1.0}}, 2);
    const auto sc = estimate_support(c);
    CHECK(sc.A == doctest::Approx(0.7));
    CHECK(sc.B == doctest::Approx(0.7));
}

TEST_CASE("estimate_support respects the phi range for general systems") {
    for (const auto& spec : {fixtures::ternary(), fixtures::binary_q3()}) {
        const auto sup = estimate_support(spec);
        CHECK(sup.A >= spec.phi_min() - 1e-9);
        CHECK(sup.B <= spec.phi_max() + 1e-9);
        CHECK(sup.A < sup.alpha_star);
        CHECK(sup.alpha_star < sup.B);
    }
}

TEST_CASE("the alpha = 0 level of phi = ij is the multiplicative golden mean shift") {
    // Words with x_k x_{2k} = 0 for every k; their dimension is -log2 p with
    // p^3 = (1 - p)^2. The level set at the endpoint is reached as a limit.
    const SystemSpec spec = fixtures::symbolic_ij();
    std::vector<double> grid{0.0, 0.05, 0.1, 0.15, 0.2, 0.25};
    const auto pts = spectrum_curve(spec, grid);
    REQUIRE(pts[0].converged);
    CHECK(pts[0].dim == doctest::Approx(oracle::multiplicative_golden_mean_dim()).epsilon(1e-8));
    const auto sup = estimate_support(spec);
    CHECK(-sup.rA / 2 == doctest::Approx(oracle::multiplicative_golden_mean_dim()).epsilon(1e-3));
}

TEST_CASE("dimension conversions") {
    const SystemSpec spec = fixtures::ternary();
    CHECK(dimension_from_r(spec, -1.5) == doctest::Approx(0.5));
    CHECK(paper_dimension_from_r(spec, -1.5) == doctest::Approx(-0.5 / std::log(3.0)));
}
