#include "multierg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "multierg/errors.hpp"
#include "multierg/kernels.hpp"
#include "multierg/telescopic.hpp"

namespace multierg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kAdmissibleSlack = 1e-12;
constexpr int kMaxLatticeDenominator = 64;

bool admissible(double average, double alpha, double eps) {
    return std::abs(average - alpha) <= eps + kAdmissibleSlack;
}

// w * exp(log_scale) with max(w) == 1.
struct ScaledTable {
    std::vector<double> w;
    double log_scale = 0.0;
};

void normalize(ScaledTable& t) {
    const double peak = *std::max_element(t.w.begin(), t.w.end());
    if (!(peak > 0.0)) return;
    for (double& v : t.w) v /= peak;
    t.log_scale += std::log(peak);
}

ScaledTable convolve(const ScaledTable& a, const ScaledTable& b) {
    ScaledTable out;
    out.w.resize(a.w.size() + b.w.size() - 1);
    kernels::convolve(a.w, b.w, out.w);
    out.log_scale = a.log_scale + b.log_scale;
    normalize(out);
    return out;
}

ScaledTable convolution_power(const ScaledTable& base, std::size_t exponent) {
    ScaledTable result{{1.0}, 0.0};
    ScaledTable square = base;
    while (exponent > 0) {
        if (exponent & 1U) result = convolve(result, square);
        exponent >>= 1U;
        if (exponent > 0) square = convolve(square, square);
    }
    return result;
}

// Log-weights over phi-sum bins for one chain with `length` entries.
std::vector<double> chain_log_table(const SystemSpec& spec, const PhiBinning& bins, std::size_t length, double d) {
    const int m = spec.m;
    const std::size_t width = (length - 1) * static_cast<std::size_t>(bins.max_pair_bin) + 1;
    std::vector<double> cur(static_cast<std::size_t>(m) * width, 0.0);
    std::vector<double> next(cur.size());
    std::vector<double> symbol_weight(m);
    for (int a = 0; a < m; ++a) symbol_weight[a] = std::exp(-d * spec.lambdas[a]);
    for (int a = 0; a < m; ++a) cur[a * width] = symbol_weight[a];
    for (std::size_t step = 1; step < length; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        const std::size_t reach = (step - 1) * static_cast<std::size_t>(bins.max_pair_bin) + 1;
        for (int a = 0; a < m; ++a) {
            const double* src = cur.data() + a * width;
            for (int b = 0; b < m; ++b) {
                const long shift = bins.pair_bins[a * m + b];
                double* dst = next.data() + b * width + shift;
                const double wb = symbol_weight[b];
                for (std::size_t k = 0; k < reach; ++k) dst[k] += src[k] * wb;
            }
        }
        cur.swap(next);
    }
    std::vector<double> out(width, 0.0);
    for (int a = 0; a < m; ++a) {
        for (std::size_t k = 0; k < width; ++k) out[k] += cur[a * width + k];
    }
    for (double& v : out) v = v > 0.0 ? std::log(v) : kNegInf;
    return out;
}

double tilted_mean(const std::vector<double>& log_table, double theta) {
    double peak = kNegInf;
    for (std::size_t b = 0; b < log_table.size(); ++b) peak = std::max(peak, log_table[b] + theta * b);
    double z = 0.0;
    double zb = 0.0;
    for (std::size_t b = 0; b < log_table.size(); ++b) {
        const double e = std::exp(log_table[b] + theta * b - peak);
        z += e;
        zb += e * static_cast<double>(b);
    }
    return zb / z;
}

struct ChainClass {
    std::size_t length = 0;
    std::size_t count = 0;
};

std::vector<ChainClass> chain_classes(std::size_t n, int q) {
    std::map<std::size_t, std::size_t> by_length;
    for (const Chain& c : chain_layout(n, q).chains) ++by_length[c.entries.size()];
    std::vector<ChainClass> out;
    for (const auto& [len, cnt] : by_length) out.push_back({len, cnt});
    return out;
}

double log_admissible_mass(const CountTable& table, double alpha, double eps, std::size_t pairs) {
    double peak = kNegInf;
    std::vector<double> logs;
    logs.reserve(table.weights.size());
    for (std::size_t b = 0; b < table.weights.size(); ++b) {
        const double avg = (table.phi_offset + table.bin_width * static_cast<double>(b)) / static_cast<double>(pairs);
        if (!admissible(avg, alpha, eps) || !(table.weights[b] > 0.0)) continue;
        const double lw = table.log_weight(b);
        logs.push_back(lw);
        peak = std::max(peak, lw);
    }
    if (logs.empty()) return kNegInf;
    double z = 0.0;
    for (double v : logs) z += std::exp(v - peak);
    return peak + std::log(z);
}

template <class LogMass>
double moran_root(double log_count, double n_lambda_min, double tol, LogMass&& log_mass) {
    if (!(log_count > 0.0)) return 0.0;
    double lo = 0.0;
    double hi = log_count / n_lambda_min;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (log_mass(mid) > 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::size_t checked_power(std::size_t base, std::size_t exponent, std::size_t limit) {
    std::size_t out = 1;
    for (std::size_t i = 0; i < exponent; ++i) {
        if (out > limit / base) return limit + 1;
        out *= base;
    }
    return out;
}

LevelSetCount exhaustive_count(const SystemSpec& spec, std::size_t n, double alpha, double eps,
                               const OracleOptions& opts) {
    const std::size_t m = static_cast<std::size_t>(spec.m);
    const std::size_t total = checked_power(m, n, opts.max_exhaustive_words);
    if (total > opts.max_exhaustive_words) {
        std::ostringstream os;
        os << "exhaustive enumeration of " << m << "^" << n << " words exceeds the limit of "
           << opts.max_exhaustive_words;
        throw std::length_error(os.str());
    }
    const std::size_t pairs = n / static_cast<std::size_t>(spec.q);
    std::vector<Symbol> word(n, 0);
    std::vector<double> lambda_sums;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (std::size_t k = 0; k < n; ++k) {
            word[k] = static_cast<Symbol>(c % m);
            c /= m;
        }
        double phi_sum = 0.0;
        for (std::size_t k = 1; k <= pairs; ++k) phi_sum += spec.phi_at(word[k - 1], word[spec.q * k - 1]);
        if (!admissible(phi_sum / static_cast<double>(pairs), alpha, eps)) continue;
        double lsum = 0.0;
        for (Symbol w : word) lsum += spec.lambdas[w];
        lambda_sums.push_back(lsum);
    }

    LevelSetCount out;
    out.n = n;
    out.alpha = alpha;
    out.eps = eps;
    out.mode = OracleMode::Exhaustive;
    out.exact_bins = true;
    out.count = static_cast<double>(lambda_sums.size());
    out.log_count = lambda_sums.empty() ? kNegInf : std::log(out.count);
    auto log_mass = [&](double d) {
        double peak = kNegInf;
        for (double l : lambda_sums) peak = std::max(peak, -d * l);
        double z = 0.0;
        for (double l : lambda_sums) z += std::exp(-d * l - peak);
        return peak + std::log(z);
    };
    out.moran_dim = lambda_sums.empty()
                        ? 0.0
                        : moran_root(out.log_count, static_cast<double>(n) * spec.lambda_min(), opts.moran_tol, log_mass);
    return out;
}

} // namespace

std::string_view to_string(OracleMode mode) { return mode == OracleMode::Dp ? "dp" : "exhaustive"; }

double CountTable::log_weight(std::size_t b) const {
    return std::log(weights[b]) + log_scale - tilt * static_cast<double>(b);
}

PhiBinning phi_binning(const SystemSpec& spec, std::size_t n, std::size_t max_bins) {
    const int m = spec.m;
    const double lo = spec.phi_min();
    const double range = spec.phi_max() - lo;
    const std::size_t pairs = std::max<std::size_t>(1, n / static_cast<std::size_t>(spec.q));
    PhiBinning out;
    out.pair_bins.assign(static_cast<std::size_t>(m) * m, 0);
    if (range == 0.0) return out;

    for (int k = 1; k <= kMaxLatticeDenominator; ++k) {
        const double unit = range / k;
        bool on_lattice = true;
        for (double v : spec.phi) {
            const double x = (v - lo) / unit;
            if (std::abs(x - std::round(x)) > 1e-9 * k) {
                on_lattice = false;
                break;
            }
        }
        if (on_lattice && pairs * static_cast<std::size_t>(k) + 1 <= max_bins) {
            out.unit = unit;
            out.exact = true;
            for (std::size_t i = 0; i < out.pair_bins.size(); ++i) {
                out.pair_bins[i] = std::lround((spec.phi[i] - lo) / unit);
            }
            out.max_pair_bin = k;
            return out;
        }
        if (on_lattice) break;
    }

    out.exact = false;
    out.unit = std::max(range / (8.0 * static_cast<double>(std::max<std::size_t>(n, 1))),
                        static_cast<double>(pairs) * range / static_cast<double>(max_bins - 1));
    for (std::size_t i = 0; i < out.pair_bins.size(); ++i) {
        out.pair_bins[i] = std::lround((spec.phi[i] - lo) / out.unit);
        out.max_pair_bin = std::max(out.max_pair_bin, out.pair_bins[i]);
    }
    return out;
}

CountTable count_table(const SystemSpec& spec, std::size_t n, double d, double target_alpha,
                       const OracleOptions& opts) {
    if (n < static_cast<std::size_t>(spec.q)) throw std::invalid_argument("count_table: depth shorter than q");
    const std::size_t pairs = n / static_cast<std::size_t>(spec.q);
    const PhiBinning bins = phi_binning(spec, n, opts.max_bins);
    const std::size_t total_bins = pairs * static_cast<std::size_t>(bins.max_pair_bin) + 1;
    if (total_bins > 4 * opts.max_bins) {
        std::ostringstream os;
        os << "count table needs " << total_bins << " bins (" << total_bins * sizeof(double) << " bytes)";
        throw std::length_error(os.str());
    }

    const auto classes = chain_classes(n, spec.q);
    std::vector<std::vector<double>> logs;
    logs.reserve(classes.size());
    for (const auto& c : classes) logs.push_back(chain_log_table(spec, bins, c.length, d));

    // Tilt so the tilted mean of the phi-sum bin sits on the target level.
    double target = (target_alpha - spec.phi_min()) * static_cast<double>(pairs) / bins.unit;
    target = std::clamp(target, 0.25, static_cast<double>(total_bins - 1) - 0.25);
    double theta = 0.0;
    if (total_bins > 1) {
        auto mean_at = [&](double th) {
            double mean = 0.0;
            for (std::size_t i = 0; i < classes.size(); ++i) {
                mean += static_cast<double>(classes[i].count) * tilted_mean(logs[i], th);
            }
            return mean;
        };
        double lo = -60.0;
        double hi = 60.0;
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mean_at(mid) < target) lo = mid; else hi = mid;
        }
        theta = 0.5 * (lo + hi);
    }

    ScaledTable acc{{1.0}, 0.0};
    for (std::size_t i = 0; i < classes.size(); ++i) {
        ScaledTable base;
        base.w.resize(logs[i].size());
        double peak = kNegInf;
        for (std::size_t b = 0; b < logs[i].size(); ++b) peak = std::max(peak, logs[i][b] + theta * b);
        for (std::size_t b = 0; b < logs[i].size(); ++b) base.w[b] = std::exp(logs[i][b] + theta * b - peak);
        base.log_scale = peak;
        acc = convolve(acc, convolution_power(base, classes[i].count));
    }

    CountTable out;
    out.n = n;
    out.d = d;
    out.bin_width = bins.unit;
    out.phi_offset = static_cast<double>(pairs) * spec.phi_min();
    out.tilt = theta;
    out.log_scale = acc.log_scale;
    out.weights = std::move(acc.w);
    out.exact_bins = bins.exact;
    return out;
}

LevelSetCount level_set_count(const SystemSpec& spec, std::size_t n, double alpha, double eps,
                              const OracleOptions& opts) {
    if (!(eps > 0.0)) throw std::invalid_argument("level_set_count: eps must be positive");
    if (n < static_cast<std::size_t>(spec.q)) throw std::invalid_argument("level_set_count: depth shorter than q");
    if (opts.mode == OracleMode::Exhaustive) return exhaustive_count(spec, n, alpha, eps, opts);

    const std::size_t pairs = n / static_cast<std::size_t>(spec.q);
    auto log_mass = [&](double d) {
        return log_admissible_mass(count_table(spec, n, d, alpha, opts), alpha, eps, pairs);
    };

    LevelSetCount out;
    out.n = n;
    out.alpha = alpha;
    out.eps = eps;
    out.mode = OracleMode::Dp;
    const CountTable counts = count_table(spec, n, 0.0, alpha, opts);
    out.exact_bins = counts.exact_bins;
    out.log_count = log_admissible_mass(counts, alpha, eps, pairs);
    out.count = std::isfinite(out.log_count) ? std::exp(out.log_count) : 0.0;
    out.moran_dim = std::isfinite(out.log_count)
                        ? moran_root(out.log_count, static_cast<double>(n) * spec.lambda_min(), opts.moran_tol, log_mass)
                        : 0.0;
    return out;
}

ExhaustiveCheck exhaustive_check(const SystemSpec& spec, double s, double r, std::size_t n,
                                 const TransferOptions& topts) {
    const std::size_t m = static_cast<std::size_t>(spec.m);
    const std::size_t total = checked_power(m, n, 1000000);
    if (total > 1000000) throw std::length_error("exhaustive_check: m^n exceeds 1e6 words");

    ExhaustiveCheck out;
    out.n = n;
    if (n == 0) {
        out.mass = 1.0;
        return out;
    }
    const TransferSolution sol = solve_transfer(spec, s, r, topts);
    const MarkovKernel kernel = transition_kernel(spec, sol);
    const ChainLayout layout = chain_layout(n, spec.q);

    std::vector<Symbol> word(n, 0);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (std::size_t k = 0; k < n; ++k) {
            word[k] = static_cast<Symbol>(c % m);
            c /= m;
        }
        const double lm = cylinder_measure(kernel, layout, word);
        const double mass = std::exp(lm);
        out.mass += mass;
        out.expected_log_measure += mass * lm;
    }

    const double peak = *std::max_element(sol.log_t.begin(), sol.log_t.end());
    double z = 0.0;
    for (double v : sol.log_t) z += std::exp(v - peak);
    const double P = peak + std::log(z);
    int depths = 0;
    for (std::size_t p = 1; p <= n; p *= static_cast<std::size_t>(spec.q)) ++depths;
    const double phi_bar = expected_phi(kernel, spec, 1e-12, depths);
    const double lambda_bar = expected_lyapunov(kernel, spec, 1e-12, depths);
    const double q = spec.q;
    out.model_value = -static_cast<double>(n) * ((1.0 - 1.0 / q) * P - (s * phi_bar + r * lambda_bar) / q);
    out.constant = std::abs(out.expected_log_measure - out.model_value) / std::sqrt(static_cast<double>(n));
    return out;
}

} // namespace multierg
