#include "multierg/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "multierg/errors.hpp"

namespace multierg {

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::ostringstream os;
    os << "invalid system: ";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) os << "; ";
        os << parts[i];
    }
    return os.str();
}

constexpr double kLambdaConsistency = 1e-12;

} // namespace

SpecError::SpecError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

double SystemSpec::phi_min() const { return *std::min_element(phi.begin(), phi.end()); }
double SystemSpec::phi_max() const { return *std::max_element(phi.begin(), phi.end()); }
double SystemSpec::lambda_min() const { return *std::min_element(lambdas.begin(), lambdas.end()); }
double SystemSpec::lambda_max() const { return *std::max_element(lambdas.begin(), lambdas.end()); }

std::vector<double> derive_lambdas(std::span<const Interval> intervals) {
    std::vector<double> out;
    out.reserve(intervals.size());
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const double len = intervals[i].length();
        if (!(len > 0.0)) {
            throw SpecError({"zero-length interval at index " + std::to_string(i)});
        }
        out.push_back(-std::log(len));
    }
    return out;
}

std::vector<Interval> synthesize_intervals(std::span<const double> lambdas) {
    const std::size_t m = lambdas.size();
    std::vector<double> lengths(m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        lengths[i] = std::exp(-lambdas[i]);
        total += lengths[i];
    }
    const double gap = m > 1 ? std::max(0.0, 1.0 - total) / static_cast<double>(m - 1) : 0.0;
    std::vector<Interval> out(m);
    double cursor = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        out[i] = {cursor, cursor + lengths[i]};
        cursor += lengths[i] + gap;
    }
    // Pin the last endpoint so f_{m-1} fixes 1 exactly.
    if (m > 1 && total <= 1.0) {
        out[m - 1] = {1.0 - lengths[m - 1], 1.0};
    }
    return out;
}

SystemSpec validate_spec(const RawSystem& raw) {
    std::vector<std::string> problems;

    if (raw.ell != 2) {
        problems.push_back("unsupported arity: ell = " + std::to_string(raw.ell) + " (only ell = 2)");
    }
    if (raw.q < 2) {
        problems.push_back("q must be at least 2 (got " + std::to_string(raw.q) + ")");
    }
    if (!raw.intervals && !raw.lambdas) {
        problems.push_back("either intervals or lambdas must be given");
        throw SpecError(problems);
    }

    int m = raw.m.value_or(raw.intervals ? static_cast<int>(raw.intervals->size())
                                         : static_cast<int>(raw.lambdas->size()));
    if (raw.intervals && static_cast<int>(raw.intervals->size()) != m) {
        problems.push_back("interval count does not match m");
    }
    if (raw.lambdas && static_cast<int>(raw.lambdas->size()) != m) {
        problems.push_back("lambda count does not match m");
    }
    if (m < 2 || m > kMaxBranches) {
        problems.push_back("m must lie in [2, " + std::to_string(kMaxBranches) + "] (got " + std::to_string(m) + ")");
    }
    if (!problems.empty() && (m < 2 || m > kMaxBranches)) {
        throw SpecError(problems);
    }

    SystemSpec spec;
    spec.m = m;
    spec.q = raw.q;
    spec.ell = raw.ell;

    if (raw.lambdas) {
        for (std::size_t i = 0; i < raw.lambdas->size(); ++i) {
            const double l = (*raw.lambdas)[i];
            if (!std::isfinite(l) || !(l > 0.0)) {
                problems.push_back("nonpositive lambda at index " + std::to_string(i));
            }
        }
    }

    if (raw.intervals) {
        const auto& iv = *raw.intervals;
        double total = 0.0;
        bool geometry_ok = true;
        for (std::size_t i = 0; i < iv.size(); ++i) {
            const double u = iv[i][0];
            const double v = iv[i][1];
            if (!std::isfinite(u) || !std::isfinite(v) || u < 0.0 || v > 1.0) {
                problems.push_back("interval " + std::to_string(i) + " lies outside [0,1]");
                geometry_ok = false;
                continue;
            }
            const double len = v - u;
            if (!(len > 0.0)) {
                problems.push_back("zero-length interval at index " + std::to_string(i));
                geometry_ok = false;
            } else if (!(len < 1.0)) {
                problems.push_back("interval " + std::to_string(i) + " has length 1 (nonpositive lambda)");
                geometry_ok = false;
            }
            total += len;
            if (i + 1 < iv.size()) {
                if (iv[i + 1][0] < u) {
                    problems.push_back("intervals not ordered left-to-right at index " + std::to_string(i + 1));
                    geometry_ok = false;
                } else if (iv[i + 1][0] < v) {
                    problems.push_back("overlapping interiors between intervals " + std::to_string(i) + " and " +
                                       std::to_string(i + 1));
                    geometry_ok = false;
                }
            }
        }
        if (total > 1.0 + 1e-15) {
            problems.push_back("total length exceeds 1");
            geometry_ok = false;
        }
        if (geometry_ok) {
            for (const auto& p : iv) spec.intervals.push_back({p[0], p[1]});
            spec.lambdas = derive_lambdas(spec.intervals);
            if (raw.lambdas) {
                for (int i = 0; i < m; ++i) {
                    if (std::abs((*raw.lambdas)[i] - spec.lambdas[i]) > kLambdaConsistency) {
                        problems.push_back("lambda inconsistent with interval at index " + std::to_string(i));
                    }
                }
            }
        }
    } else if (problems.empty()) {
        double total = 0.0;
        for (double l : *raw.lambdas) total += std::exp(-l);
        if (total > 1.0 + 1e-15) {
            problems.push_back("total length exceeds 1");
        } else {
            spec.lambdas = *raw.lambdas;
            spec.intervals = synthesize_intervals(spec.lambdas);
        }
    }

    if (static_cast<int>(raw.phi.size()) != m) {
        problems.push_back("phi must be an m x m table");
    } else {
        spec.phi.reserve(static_cast<std::size_t>(m) * m);
        bool shape_ok = true;
        bool finite = true;
        for (const auto& row : raw.phi) {
            if (static_cast<int>(row.size()) != m) {
                shape_ok = false;
                continue;
            }
            for (double v : row) {
                if (!std::isfinite(v)) finite = false;
                spec.phi.push_back(v);
            }
        }
        if (!shape_ok) problems.push_back("phi must be an m x m table");
        if (!finite) problems.push_back("non-finite phi entry");
    }

    if (!problems.empty()) throw SpecError(std::move(problems));
    return spec;
}

CylinderInterval code_point(const SystemSpec& spec, std::span<const Symbol> prefix) {
    // Compose outward: lo accumulates u_{w_k} * prod_{j<k} |I_{w_j}|.
    CylinderInterval out;
    double lo = 0.0;
    double scale = 1.0;
    double log_len = 0.0;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
        const int w = prefix[k];
        if (w >= spec.m) {
            throw SpecError({"symbol out of range at position " + std::to_string(k)});
        }
        const Interval& iv = spec.intervals[w];
        lo += scale * iv.lo;
        scale *= iv.length();
        log_len -= spec.lambdas[w];
    }
    out.interval = {lo, lo + scale};
    out.length = scale;
    out.log_length = log_len;
    return out;
}

double bowen_dimension(std::span<const double> lambdas) {
    const double lmin = *std::min_element(lambdas.begin(), lambdas.end());
    auto excess = [&](double d, double* slope) {
        double sum = 0.0;
        double dsum = 0.0;
        for (double l : lambdas) {
            const double e = std::exp(-d * l);
            sum += e;
            dsum -= l * e;
        }
        if (slope) *slope = dsum;
        return sum - 1.0;
    };

    double lo = 0.0;
    double hi = std::log(static_cast<double>(lambdas.size())) / lmin;
    double d = 0.5 * (lo + hi);
    double best = d;
    double best_abs = INFINITY;
    for (int it = 0; it < 200; ++it) {
        double slope = 0.0;
        const double g = excess(d, &slope);
        if (std::abs(g) < best_abs) {
            best_abs = std::abs(g);
            best = d;
        }
        if (std::abs(g) < 1e-15) break;
        if (g > 0.0) lo = d; else hi = d;
        double next = d - g / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == d || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) break;
        d = next;
    }
    return best;
}

} // namespace multierg
