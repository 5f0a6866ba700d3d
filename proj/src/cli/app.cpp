#include "multierg/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>

#include "multierg/config.hpp"
#include "multierg/csv.hpp"
#include "multierg/errors.hpp"
#include "multierg/kernels.hpp"
#include "multierg/oracle.hpp"
#include "multierg/pressure.hpp"
#include "multierg/spectrum.hpp"
#include "multierg/telescopic.hpp"
#include "multierg/transfer.hpp"

namespace multierg::cli {

namespace {

namespace fs = std::filesystem;
using io::CsvWriter;

struct Overrides {
    std::optional<double> s;
    std::optional<double> r;
    std::optional<double> alpha;
    std::optional<std::size_t> n;
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> depth;
    std::optional<double> eps;
    std::optional<unsigned> threads;
    std::optional<std::string> out;
};

struct Context {
    RunConfig cfg;
    Overrides ov;
    std::string command;
    fs::path dir;
    std::ostream& out;
    std::vector<std::string> files;

    TransferOptions transfer() const { return {cfg.solver.tol, cfg.solver.max_iter}; }
    CriticalOptions critical() const {
        CriticalOptions o;
        o.transfer = transfer();
        return o;
    }
    fs::path file(const std::string& name) {
        files.push_back(name);
        return dir / name;
    }
};

std::vector<double> linspace(double lo, double hi, int steps) {
    std::vector<double> out(steps);
    if (steps == 1) {
        out[0] = lo;
        return out;
    }
    for (int i = 0; i < steps; ++i) out[i] = lo + (hi - lo) * i / (steps - 1);
    out.back() = hi;
    return out;
}

std::vector<double> alpha_grid(const RunConfig& cfg) {
    return linspace(cfg.spectrum.alpha_min.value_or(cfg.system.phi_min()),
                    cfg.spectrum.alpha_max.value_or(cfg.system.phi_max()), cfg.spectrum.steps);
}

SpectrumPoint critical_point(const Context& ctx, double alpha) {
    const double grid[] = {alpha};
    const SpectrumPoint p = spectrum_curve(ctx.cfg.system, grid, ctx.critical()).front();
    if (!p.converged) {
        throw ConvergenceError("critical system did not converge at alpha = " + io::format_number(alpha));
    }
    return p;
}

struct KernelChoice {
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    double r = 0.0;
    double predicted = 0.0;
    MarkovKernel kernel;
};

// Explicit --s/--r picks an arbitrary kernel; otherwise the critical kernel of
// --alpha (default: the spectrum peak).
KernelChoice choose_kernel(const Context& ctx) {
    const SystemSpec& spec = ctx.cfg.system;
    KernelChoice c;
    if (ctx.ov.s && ctx.ov.r) {
        c.s = *ctx.ov.s;
        c.r = *ctx.ov.r;
    } else {
        c.alpha = ctx.ov.alpha ? *ctx.ov.alpha : alpha_star(spec, ctx.critical()).alpha_star;
        const SpectrumPoint p = critical_point(ctx, c.alpha);
        c.s = p.s;
        c.r = p.r;
    }
    const TransferSolution sol = solve_transfer(spec, c.s, c.r, ctx.transfer());
    c.kernel = transition_kernel(spec, sol);
    c.predicted = dimension_from_r(spec, c.r);
    if (std::isnan(c.alpha)) {
        // Off the critical curve the measure-level local dimension picks up
        // (Pn - s Phi) / (q Lambda); the term vanishes on the curve.
        const double pn = pressure(spec, c.s, c.r, ctx.transfer()).Pn;
        c.predicted += (pn - c.s * expected_phi(c.kernel, spec)) / (spec.q * expected_lyapunov(c.kernel, spec));
    }
    return c;
}

const std::vector<std::string> kSampleHeader = {"sample_id", "n",     "avg_phi", "expected",
                                                "log_measure", "log_length", "ratio", "predicted"};

void write_samples(CsvWriter& csv, const std::vector<SampleRecord>& recs) {
    for (const auto& s : recs) {
        csv.row({static_cast<std::uint64_t>(s.sample_id), static_cast<std::uint64_t>(s.n), s.avg_phi, s.expected,
                 s.log_measure, s.log_length, s.ratio, s.predicted});
    }
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

int cmd_transfer(Context& ctx) {
    const SystemSpec& spec = ctx.cfg.system;
    const double s = ctx.ov.s.value_or(0.0);
    const double r = ctx.ov.r.value_or(0.0);
    const TransferSolution sol = solve_transfer(spec, s, r, ctx.transfer());
    const MarkovKernel k = transition_kernel(spec, sol);
    CsvWriter csv(ctx.file("transfer.csv"), {"s", "r", "index", "t", "log_t", "initial", "residual", "iterations"});
    for (int i = 0; i < spec.m; ++i) {
        csv.row({s, r, static_cast<std::int64_t>(i), sol.t[i], sol.log_t[i], k.initial[i], sol.residual,
                 static_cast<std::int64_t>(sol.iterations)});
    }
    ctx.out << "t = (";
    for (int i = 0; i < spec.m; ++i) ctx.out << (i ? ", " : "") << io::format_number(sol.t[i]);
    ctx.out << "), residual = " << io::format_number(sol.residual) << "\n";
    return kOk;
}

int cmd_pressure_grid(Context& ctx) {
    const SystemSpec& spec = ctx.cfg.system;
    const GridBlock& g = ctx.cfg.grid;
    CsvWriter csv(ctx.file("pressure_grid.csv"),
                  {"s", "r", "P", "Pn", "dPn_ds", "dPn_dr", "hess_ss", "hess_sr", "hess_rr"});
    for (double s : linspace(g.s_min, g.s_max, g.points)) {
        for (double r : linspace(g.r_min, g.r_max, g.points)) {
            const PressurePoint p = pressure_with_gradient(spec, s, r, ctx.transfer());
            const Hessian2 h = pressure_hessian(spec, s, r, ctx.transfer());
            csv.row({s, r, p.P, p.Pn, p.dPn_ds, p.dPn_dr, h.ss, h.sr, h.rr});
        }
    }
    ctx.out << "pressure grid: " << g.points * g.points << " points\n";
    return kOk;
}

int cmd_spectrum(Context& ctx) {
    const auto grid = alpha_grid(ctx.cfg);
    const auto pts = spectrum_curve(ctx.cfg.system, grid, ctx.critical());
    CsvWriter csv(ctx.file("spectrum.csv"), {"alpha", "s", "r", "dim", "paper_dim", "converged", "newton_residual"});
    std::size_t ok = 0;
    for (const auto& p : pts) {
        csv.row({p.alpha, p.s, p.r, p.dim, p.paper_dim, p.converged, p.newton_residual});
        ok += p.converged;
    }
    ctx.out << "spectrum: " << ok << "/" << pts.size() << " levels converged\n";
    return kOk;
}

int cmd_support(Context& ctx) {
    const SystemSpec& spec = ctx.cfg.system;
    const SupportEstimate e = estimate_support(spec, 1e-4, ctx.critical());
    CsvWriter csv(ctx.file("support.csv"),
                  {"A", "B", "rA", "rB", "dim_A", "dim_B", "alpha_star", "left_alpha", "right_alpha", "approximate"});
    csv.row({e.A, e.B, e.rA, e.rB, dimension_from_r(spec, e.rA), dimension_from_r(spec, e.rB), e.alpha_star,
             e.achieved_alphas.at(0), e.achieved_alphas.at(1), e.approximate});
    ctx.out << "support: [" << io::format_number(e.A) << ", " << io::format_number(e.B) << "]\n";
    return kOk;
}

int cmd_sample(Context& ctx) {
    const SystemSpec& spec = ctx.cfg.system;
    const auto& mc = ctx.cfg.montecarlo;
    const KernelChoice k = choose_kernel(ctx);
    const ChainLayout layout = chain_layout(mc.n, spec.q);
    const auto recs = sample_batch(spec, k.kernel, layout, mc.seed, mc.samples, k.predicted, mc.threads);
    CsvWriter csv(ctx.file("samples.csv"), kSampleHeader);
    write_samples(csv, recs);
    ctx.out << "sampled " << recs.size() << " words of length " << mc.n << "\n";
    return kOk;
}

int cmd_verify_lln(Context& ctx) {
    const SystemSpec& spec = ctx.cfg.system;
    const auto& mc = ctx.cfg.montecarlo;
    const KernelChoice k = choose_kernel(ctx);
    const ChainLayout layout = chain_layout(mc.n, spec.q);
    const auto recs = sample_batch(spec, k.kernel, layout, mc.seed, mc.samples, k.predicted, mc.threads);
    CsvWriter samples(ctx.file("lln_samples.csv"), kSampleHeader);
    write_samples(samples, recs);

    double mean = 0.0;
    for (const auto& s : recs) mean += s.avg_phi;
    mean /= static_cast<double>(recs.size());
    double var = 0.0;
    for (const auto& s : recs) var += (s.avg_phi - mean) * (s.avg_phi - mean);
    const double sd = recs.size() > 1 ? std::sqrt(var / static_cast<double>(recs.size() - 1)) : 0.0;
    const double se = sd / std::sqrt(static_cast<double>(recs.size()));
    const double expected = recs.front().expected;
    const double z = se > 0.0 ? std::abs(mean - expected) / se : (mean == expected ? 0.0 : INFINITY);
    const bool pass = z <= 4.0;
    CsvWriter csv(ctx.file("lln.csv"),
                  {"alpha", "s", "r", "n", "samples", "mean", "std", "stderr", "expected", "z", "pass"});
    csv.row({k.alpha, k.s, k.r, static_cast<std::uint64_t>(mc.n), static_cast<std::uint64_t>(mc.samples), mean, sd, se,
             expected, z, pass});
    ctx.out << "lln: mean " << io::format_number(mean) << " expected " << io::format_number(expected) << " z "
            << io::format_number(z) << (pass ? " PASS" : " FAIL") << "\n";
    return pass ? kOk : kVerificationFailed;
}

int cmd_verify_localdim(Context& ctx) {
    const SystemSpec& spec = ctx.cfg.system;
    const auto& mc = ctx.cfg.montecarlo;
    std::vector<double> alphas;
    if (ctx.ov.alpha) {
        alphas = {*ctx.ov.alpha};
    } else {
        const double top = alpha_star(spec, ctx.critical()).alpha_star;
        alphas = {top - 0.05, top, top + 0.05};
    }
    const ChainLayout layout = chain_layout(mc.n, spec.q);
    CsvWriter csv(ctx.file("localdim.csv"),
                  {"alpha", "s", "r", "n", "samples", "median", "predicted", "abs_error", "pass"});
    bool all = true;
    for (double a : alphas) {
        const SpectrumPoint p = critical_point(ctx, a);
        const MarkovKernel kernel = transition_kernel(spec, solve_transfer(spec, p.s, p.r, ctx.transfer()));
        const auto recs = sample_batch(spec, kernel, layout, mc.seed, mc.samples, p.dim, mc.threads);
        std::vector<double> ratios;
        ratios.reserve(recs.size());
        for (const auto& s : recs) ratios.push_back(s.ratio);
        const double med = median(ratios);
        const double err = std::abs(med - p.dim);
        const bool pass = err <= 0.05;
        all = all && pass;
        csv.row({a, p.s, p.r, static_cast<std::uint64_t>(mc.n), static_cast<std::uint64_t>(mc.samples), med, p.dim, err,
                 pass});
        ctx.out << "localdim alpha " << io::format_number(a) << ": median " << io::format_number(med) << " predicted "
                << io::format_number(p.dim) << (pass ? " PASS" : " FAIL") << "\n";
    }
    return all ? kOk : kVerificationFailed;
}

int cmd_verify_convexity(Context& ctx) {
    const SystemSpec& spec = ctx.cfg.system;
    const GridBlock& g = ctx.cfg.grid;
    const bool strict = !spec.phi_constant() && spec.lambda_min() != spec.lambda_max();
    CsvWriter csv(ctx.file("convexity.csv"),
                  {"s", "r", "hess_ss", "hess_sr", "hess_rr", "eig_min", "eig_max", "asymmetry", "pass"});
    bool all = true;
    for (double s : linspace(g.s_min, g.s_max, g.points)) {
        for (double r : linspace(g.r_min, g.r_max, g.points)) {
            const Hessian2 h = pressure_hessian(spec, s, r, ctx.transfer());
            const double lo = h.eigen_min();
            const bool pass = lo >= -1e-8 && (!strict || lo > 0.0);
            all = all && pass;
            csv.row({s, r, h.ss, h.sr, h.rr, lo, h.eigen_max(), h.asymmetry, pass});
        }
    }
    ctx.out << "convexity (" << (strict ? "strict" : "weak") << "): " << (all ? "PASS" : "FAIL") << "\n";
    return all ? kOk : kVerificationFailed;
}

int cmd_verify_gradient(Context& ctx) {
    const SystemSpec& spec = ctx.cfg.system;
    const GridBlock& g = ctx.cfg.grid;
    constexpr double h = 1e-5;
    CsvWriter csv(ctx.file("gradient.csv"), {"s", "r", "dPn_ds", "dPn_dr", "fd_ds", "fd_dr", "rel_err", "pass"});
    bool all = true;
    for (double s : linspace(g.s_min, g.s_max, g.points)) {
        for (double r : linspace(g.r_min, g.r_max, g.points)) {
            const PressureGradient e = pressure_gradient(spec, s, r, ctx.transfer());
            const double fs = (pressure(spec, s + h, r, ctx.transfer()).Pn - pressure(spec, s - h, r, ctx.transfer()).Pn) /
                              (2 * h);
            const double fr = (pressure(spec, s, r + h, ctx.transfer()).Pn - pressure(spec, s, r - h, ctx.transfer()).Pn) /
                              (2 * h);
            const double rel = std::max(std::abs(e.ds - fs) / (1 + std::abs(e.ds)), std::abs(e.dr - fr) / (1 + std::abs(e.dr)));
            const bool pass = rel < 1e-6;
            all = all && pass;
            csv.row({s, r, e.ds, e.dr, fs, fr, rel, pass});
        }
    }
    ctx.out << "gradient: " << (all ? "PASS" : "FAIL") << "\n";
    return all ? kOk : kVerificationFailed;
}

int cmd_oracle(Context& ctx) {
    const SystemSpec& spec = ctx.cfg.system;
    const OracleBlock& ob = ctx.cfg.oracle;
    std::vector<double> alphas = ctx.ov.alpha ? std::vector<double>{*ctx.ov.alpha} : alpha_grid(ctx.cfg);
    OracleOptions opts;
    opts.mode = ob.mode;
    CsvWriter csv(ctx.file("oracle.csv"), {"n", "alpha", "eps", "count", "moran_dim", "mode"});
    for (double a : alphas) {
        const LevelSetCount c = level_set_count(spec, ob.depth, a, ob.eps, opts);
        csv.row({static_cast<std::uint64_t>(c.n), c.alpha, c.eps, io::format_count(c.count, c.log_count), c.moran_dim,
                 std::string(to_string(c.mode))});
    }
    ctx.out << "oracle: " << alphas.size() << " levels at depth " << ob.depth << "\n";
    return kOk;
}

void write_manifest(const Context& ctx) {
    nlohmann::json m;
    m["tool"] = "multierg";
    m["version"] = std::string(kToolVersion);
    m["command"] = ctx.command;
    m["config_hash"] = config_hash(ctx.cfg);
    m["seed"] = ctx.cfg.montecarlo.seed;
    m["kernels"] = std::string(kernels::active().name);
    m["config"] = resolved_json(ctx.cfg);
    m["outputs"] = ctx.files;
    nlohmann::json ov = nlohmann::json::object();
    if (ctx.ov.s) ov["s"] = *ctx.ov.s;
    if (ctx.ov.r) ov["r"] = *ctx.ov.r;
    if (ctx.ov.alpha) ov["alpha"] = *ctx.ov.alpha;
    m["overrides"] = ov;
    std::ofstream out(ctx.dir / (ctx.command + ".manifest.json"), std::ios::binary | std::ios::trunc);
    out << m.dump(2) << '\n';
}

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
    if (ov.n) cfg.montecarlo.n = *ov.n;
    if (ov.samples) cfg.montecarlo.samples = *ov.samples;
    if (ov.seed) cfg.montecarlo.seed = *ov.seed;
    if (ov.threads) cfg.montecarlo.threads = *ov.threads;
    if (ov.depth) cfg.oracle.depth = *ov.depth;
    if (ov.eps) cfg.oracle.eps = *ov.eps;
    if (ov.out) cfg.output = *ov.out;
    if (cfg.montecarlo.n < static_cast<std::size_t>(cfg.system.q)) throw ConfigError("--n must be at least q");
    if (cfg.montecarlo.samples < 1) throw ConfigError("--samples must be at least 1");
    if (cfg.montecarlo.threads < 1) throw ConfigError("--threads must be at least 1");
    if (cfg.oracle.depth < static_cast<std::size_t>(cfg.system.q)) throw ConfigError("--depth must be at least q");
    if (!(cfg.oracle.eps > 0.0)) throw ConfigError("--eps must be positive");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multifractal spectrum of multiple ergodic averages on linear cookie-cutter sets", "multierg"};
    std::string command;
    std::string config_path;
    Overrides ov;
    const std::vector<std::string> commands = {"transfer",        "pressure-grid",   "spectrum",         "support",
                                               "sample",          "verify-lln",      "verify-localdim",  "verify-convexity",
                                               "verify-gradient", "oracle"};
    app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(commands));
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--out", ov.out, "Output directory");
    app.add_option("--s", ov.s, "Parameter s");
    app.add_option("--r", ov.r, "Parameter r");
    app.add_option("--alpha", ov.alpha, "Level alpha");
    app.add_option("--n", ov.n, "Word length for sampling");
    app.add_option("--samples", ov.samples, "Number of sampled words");
    app.add_option("--seed", ov.seed, "Sampling seed");
    app.add_option("--depth", ov.depth, "Oracle depth");
    app.add_option("--eps", ov.eps, "Oracle level tolerance");
    app.add_option("--threads", ov.threads, "Worker threads for sampling");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidConfig;
    }

    try {
        RunConfig cfg = load_config(config_path);
        apply_overrides(cfg, ov);
        Context ctx{cfg, ov, command, fs::path(cfg.output), out, {}};
        fs::create_directories(ctx.dir);

        int code = kOk;
        if (command == "transfer") code = cmd_transfer(ctx);
        else if (command == "pressure-grid") code = cmd_pressure_grid(ctx);
        else if (command == "spectrum") code = cmd_spectrum(ctx);
        else if (command == "support") code = cmd_support(ctx);
        else if (command == "sample") code = cmd_sample(ctx);
        else if (command == "verify-lln") code = cmd_verify_lln(ctx);
        else if (command == "verify-localdim") code = cmd_verify_localdim(ctx);
        else if (command == "verify-convexity") code = cmd_verify_convexity(ctx);
        else if (command == "verify-gradient") code = cmd_verify_gradient(ctx);
        else if (command == "oracle") code = cmd_oracle(ctx);
        write_manifest(ctx);
        return code;
    } catch (const SpecError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidConfig;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidConfig;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidConfig;
    }
}

} // namespace multierg::cli
