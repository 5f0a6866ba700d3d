#include "multierg/telescopic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "multierg/kernels.hpp"
#include "multierg/parallel.hpp"
#include "multierg/rng.hpp"

namespace multierg {

namespace {

struct CumulativeTables {
    int m = 0;
    std::vector<double> initial;
    std::vector<double> rows; // row-major cumulative transitions

    explicit CumulativeTables(const MarkovKernel& k) : m(k.m), initial(k.m), rows(k.transitions.size()) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) initial[i] = (acc += k.initial[i]);
        for (int i = 0; i < m; ++i) {
            acc = 0.0;
            for (int j = 0; j < m; ++j) rows[i * m + j] = (acc += k.p(i, j));
        }
    }

    static Symbol draw(const double* cum, int m, double u) {
        // Rows sum to 1 only up to rounding; the last symbol absorbs the rest.
        for (int j = 0; j + 1 < m; ++j) {
            if (u < cum[j]) return static_cast<Symbol>(j);
        }
        return static_cast<Symbol>(m - 1);
    }
};

void fill_word(const CumulativeTables& tables, const ChainLayout& layout, std::mt19937_64& eng,
               std::vector<Symbol>& out) {
    out.assign(layout.n, 0);
    const int m = tables.m;
    for (const Chain& chain : layout.chains) {
        Symbol x = CumulativeTables::draw(tables.initial.data(), m, uniform01(eng));
        out[chain.entries[0] - 1] = x;
        for (std::size_t k = 1; k < chain.entries.size(); ++k) {
            x = CumulativeTables::draw(tables.rows.data() + static_cast<std::size_t>(x) * m, m, uniform01(eng));
            out[chain.entries[k] - 1] = x;
        }
    }
}

double depth_series(const MarkovKernel& kernel, int q, std::span<const double> per_state, double bound, double tol,
                    int max_depth) {
    const int m = kernel.m;
    std::vector<double> marginal = kernel.initial;
    std::vector<double> next(m);
    const double lead = 1.0 - 1.0 / q;
    double weight = 1.0;
    double total = 0.0;
    for (int depth = 0;; ++depth) {
        if (max_depth >= 0 && depth >= max_depth) break;
        double term = 0.0;
        for (int a = 0; a < m; ++a) term += marginal[a] * per_state[a];
        total += lead * weight * term;
        weight /= q;
        if (max_depth < 0 && bound * weight * q / (q - 1.0) < tol) break;
        std::fill(next.begin(), next.end(), 0.0);
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) next[b] += marginal[a] * kernel.p(a, b);
        }
        marginal.swap(next);
    }
    return total;
}

} // namespace

ChainLayout chain_layout(std::size_t n, int q) {
    if (q < 2) throw std::invalid_argument("chain_layout: q must be at least 2");
    ChainLayout layout;
    layout.n = n;
    layout.q = q;
    const std::size_t uq = static_cast<std::size_t>(q);
    layout.chains.reserve(n - n / uq);
    for (std::size_t i = 1; i <= n; ++i) {
        if (i % uq == 0) continue;
        Chain c;
        c.start = i;
        for (std::size_t k = i; k <= n; k *= uq) {
            c.entries.push_back(k);
            if (k > n / uq) break;
        }
        layout.chains.push_back(std::move(c));
    }
    return layout;
}

SampledWord sample_word(const MarkovKernel& kernel, const ChainLayout& layout, std::uint64_t seed,
                        std::uint64_t index) {
    const CumulativeTables tables(kernel);
    auto eng = stream_engine(seed, index);
    SampledWord w;
    w.seed = seed;
    w.index = index;
    fill_word(tables, layout, eng, w.symbols);
    return w;
}

double multiple_average(std::span<const Symbol> word, const SystemSpec& spec) {
    const std::size_t count = word.size() / static_cast<std::size_t>(spec.q);
    if (count == 0) throw std::invalid_argument("multiple_average: word shorter than q");
    return kernels::pair_gather_sum(word, spec.q, spec.phi, spec.m) / static_cast<double>(count);
}

double expected_phi(const MarkovKernel& kernel, const SystemSpec& spec, double tol, int max_depth) {
    const int m = spec.m;
    std::vector<double> per_state(m, 0.0);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) per_state[a] += kernel.p(a, b) * spec.phi_at(a, b);
    }
    const double bound = std::max(std::abs(spec.phi_min()), std::abs(spec.phi_max()));
    return depth_series(kernel, spec.q, per_state, bound, tol, max_depth);
}

double expected_lyapunov(const MarkovKernel& kernel, const SystemSpec& spec, double tol, int max_depth) {
    return depth_series(kernel, spec.q, spec.lambdas, spec.lambda_max(), tol, max_depth);
}

double cylinder_measure(const MarkovKernel& kernel, const ChainLayout& layout, std::span<const Symbol> word) {
    if (word.size() != layout.n) throw std::invalid_argument("cylinder_measure: word length does not match layout");
    if (word.empty()) return 0.0;
    // Chain starts are the positions not divisible by q; every k <= n/q
    // contributes the step (w_k -> w_{qk}).
    const double starts = kernels::gather_sum(word, kernel.log_initial) -
                          kernels::strided_gather_sum(word, layout.q, kernel.log_initial);
    const double steps = kernels::pair_gather_sum(word, layout.q, kernel.log_transitions, kernel.m);
    return starts + steps;
}

double local_dimension_estimate(const SystemSpec& spec, const MarkovKernel& kernel, const ChainLayout& layout,
                                std::span<const Symbol> word) {
    if (word.empty()) throw std::invalid_argument("local_dimension_estimate: empty word");
    const double log_length = -kernels::gather_sum(word, spec.lambdas);
    return cylinder_measure(kernel, layout, word) / log_length;
}

std::vector<SampleRecord> sample_batch(const SystemSpec& spec, const MarkovKernel& kernel, const ChainLayout& layout,
                                       std::uint64_t seed, std::size_t count, double predicted_dim,
                                       unsigned threads) {
    const CumulativeTables tables(kernel);
    const double expected = expected_phi(kernel, spec);
    std::vector<SampleRecord> out(count);
    parallel_for(count, threads, [&](std::size_t i) {
        auto eng = stream_engine(seed, i);
        std::vector<Symbol> word;
        fill_word(tables, layout, eng, word);
        SampleRecord& rec = out[i];
        rec.sample_id = i;
        rec.n = layout.n;
        rec.avg_phi = multiple_average(word, spec);
        rec.expected = expected;
        rec.log_measure = cylinder_measure(kernel, layout, word);
        rec.log_length = -kernels::gather_sum(word, spec.lambdas);
        rec.ratio = rec.log_measure / rec.log_length;
        rec.predicted = predicted_dim;
    });
    return out;
}

} // namespace multierg
