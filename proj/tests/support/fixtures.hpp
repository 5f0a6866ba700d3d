#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "multierg/system_model.hpp"

namespace fixtures {

using multierg::RawSystem;
using multierg::SystemSpec;

inline SystemSpec make(int q, std::vector<std::array<double, 2>> intervals, std::vector<std::vector<double>> phi) {
    RawSystem raw;
    raw.m = static_cast<int>(intervals.size());
    raw.q = q;
    raw.intervals = std::move(intervals);
    raw.phi = std::move(phi);
    return multierg::validate_spec(raw);
}

// m = q = 2, lambda = (ln2, ln2), phi(i,j) = ij
inline SystemSpec symbolic_ij() { return make(2, {{0.0, 0.5}, {0.5, 1.0}}, {{0, 0}, {0, 1}}); }

// m = q = 2, lambda = (ln2, ln4), phi(i,j) = ij
inline SystemSpec golden_ij() { return make(2, {{0.0, 0.5}, {0.75, 1.0}}, {{0, 0}, {0, 1}}); }

// m = q = 3, distinct lambdas, irregular phi
inline SystemSpec ternary() {
    return make(3, {{0.0, 0.4}, {0.5, 0.7}, {0.8, 0.9}},
                {{0.3, -1.0, 0.5}, {1.2, 0.0, -0.4}, {0.1, 0.8, -0.6}});
}

// m = 2, q = 3, distinct lambdas
inline SystemSpec binary_q3() { return make(3, {{0.0, 0.5}, {0.6, 0.9}}, {{0.0, 0.5}, {-0.5, 1.0}}); }

// phi(i,j) = i, m = q = 2
inline SystemSpec first_coordinate() { return make(2, {{0.0, 0.5}, {0.5, 1.0}}, {{0, 0}, {1, 1}}); }

inline SystemSpec constant(double c, std::vector<std::array<double, 2>> intervals, int q) {
    const std::size_t m = intervals.size();
    return make(q, std::move(intervals), std::vector<std::vector<double>>(m, std::vector<double>(m, c)));
}

struct Named {
    std::string name;
    SystemSpec spec;
};

// Specs whose transfer/pressure behaviour is checked on full grids.
inline std::vector<Named> grid_specs() {
    return {{"symbolic_ij", symbolic_ij()}, {"ternary", ternary()}, {"binary_q3", binary_q3()}};
}

inline std::vector<Named> all_specs() {
    return {{"symbolic_ij", symbolic_ij()},
            {"golden_ij", golden_ij()},
            {"ternary", ternary()},
            {"binary_q3", binary_q3()},
            {"first_coordinate", first_coordinate()},
            {"constant", constant(0.7, {{0.0, 0.5}, {0.75, 1.0}}, 2)}};
}

inline std::vector<double> linspace(double a, double b, int k) {
    std::vector<double> v(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = k == 1 ? a : a + (b - a) * i / (k - 1);
    return v;
}

} // namespace fixtures
