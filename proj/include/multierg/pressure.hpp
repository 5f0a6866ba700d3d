#pragma once

#include <optional>

#include "multierg/system_model.hpp"
#include "multierg/transfer.hpp"

namespace multierg {

/// Symmetric 2x2 second-derivative matrix of the normalized pressure in (s, r).
struct Hessian2 {
    double ss = 0.0;
    double sr = 0.0;
    double rr = 0.0;
    double asymmetry = 0.0; // |d(dPn_ds)/dr - d(dPn_dr)/ds| before symmetrizing

    double eigen_min() const;
    double eigen_max() const;
};

/// P = log sum_j t_j(s, r); Pn = (q - 1) P is the normalization used by the
/// critical system and by every expectation identity.
struct PressurePoint {
    double s = 0.0;
    double r = 0.0;
    double P = 0.0;
    double Pn = 0.0;
    double dPn_ds = 0.0;
    double dPn_dr = 0.0;
    std::optional<Hessian2> hessian;
};

struct PressureGradient {
    double ds = 0.0;
    double dr = 0.0;
};

/// P and Pn only (gradient fields left at zero).
PressurePoint pressure(const SystemSpec& spec, double s, double r, const TransferOptions& opts = {});

/// Exact partials of Pn by implicit differentiation of the transfer system.
PressureGradient pressure_gradient(const SystemSpec& spec, double s, double r, const TransferOptions& opts = {});

/// Gradient at an already solved point; one m x m solve per partial.
PressureGradient gradient_at(const SystemSpec& spec, const TransferSolution& sol);

/// P, Pn and the exact gradient from a single transfer solve.
PressurePoint pressure_with_gradient(const SystemSpec& spec, double s, double r, const TransferOptions& opts = {});

/// Central finite differences of the exact gradient.
Hessian2 pressure_hessian(const SystemSpec& spec, double s, double r, const TransferOptions& opts = {},
                          double step = 1e-4);

} // namespace multierg
