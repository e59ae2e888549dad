#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "reskern/conditioning.hpp"
#include "reskern/finite_width.hpp"
#include "reskern/general.hpp"
#include "reskern/multisphere.hpp"
#include "reskern/rng.hpp"
#include "reskern/spectral.hpp"

namespace reskern {

struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string f, const std::string& msg)
        : std::runtime_error("field '" + f + "': " + msg), field(std::move(f)) {}
};

// Flat key-value config document; every field is checked and unknown keys are
// rejected so typos surface instead of silently using defaults.
class ConfigReader {
  public:
    explicit ConfigReader(const nlohmann::json& j) : j_(j) {
        if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
    }

    long long get_int(const std::string& name, long long def, long long lo, long long hi) {
        if (!j_.contains(name)) return def;
        return require_int(name, lo, hi);
    }

    long long require_int(const std::string& name, long long lo, long long hi) {
        mark(name);
        if (!j_.contains(name)) throw ConfigError(name, "required");
        const auto& v = j_.at(name);
        if (!v.is_number_integer()) throw ConfigError(name, "must be an integer");
        const long long x = v.get<long long>();
        if (x < lo || x > hi)
            throw ConfigError(name, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return x;
    }

    double get_double(const std::string& name, double def, double lo, double hi) {
        if (!j_.contains(name)) return def;
        mark(name);
        const auto& v = j_.at(name);
        if (!v.is_number()) throw ConfigError(name, "must be a number");
        const double x = v.get<double>();
        if (!(x >= lo && x <= hi))
            throw ConfigError(name, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return x;
    }

    bool get_bool(const std::string& name, bool def) {
        if (!j_.contains(name)) return def;
        mark(name);
        const auto& v = j_.at(name);
        if (!v.is_boolean()) throw ConfigError(name, "must be a boolean");
        return v.get<bool>();
    }

    std::string get_enum(const std::string& name, const std::string& def,
                         const std::vector<std::string>& allowed) {
        std::string s = def;
        if (j_.contains(name)) {
            mark(name);
            const auto& v = j_.at(name);
            if (!v.is_string()) throw ConfigError(name, "must be a string");
            s = v.get<std::string>();
        }
        for (const auto& a : allowed)
            if (s == a) return s;
        std::string msg = "must be one of {";
        for (std::size_t i = 0; i < allowed.size(); ++i) msg += (i ? ", " : "") + allowed[i];
        throw ConfigError(name, msg + "}");
    }

    std::vector<double> get_double_array(const std::string& name, std::vector<double> def,
                                         double lo, double hi) {
        if (!j_.contains(name)) return def;
        mark(name);
        const auto& v = j_.at(name);
        if (!v.is_array() || v.empty()) throw ConfigError(name, "must be a non-empty array");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(name, "entries must be numbers");
            const double x = e.get<double>();
            if (!(x >= lo && x <= hi)) throw ConfigError(name, "entries out of range");
            out.push_back(x);
        }
        return out;
    }

    std::vector<long long> get_int_array(const std::string& name, std::vector<long long> def,
                                         long long lo, long long hi) {
        if (!j_.contains(name)) return def;
        mark(name);
        const auto& v = j_.at(name);
        if (!v.is_array() || v.empty()) throw ConfigError(name, "must be a non-empty array");
        std::vector<long long> out;
        for (const auto& e : v) {
            if (!e.is_number_integer()) throw ConfigError(name, "entries must be integers");
            const long long x = e.get<long long>();
            if (x < lo || x > hi) throw ConfigError(name, "entries out of range");
            out.push_back(x);
        }
        return out;
    }

    std::uint64_t get_seed(std::uint64_t def) {
        return static_cast<std::uint64_t>(get_int("seed", static_cast<long long>(def), 0,
                                                  static_cast<long long>(1) << 62));
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (seen_.find(it.key()) == seen_.end())
                throw ConfigError(it.key(), "unknown field");
    }

  private:
    void mark(const std::string& name) { seen_.insert(name); }
    const nlohmann::json& j_;
    std::set<std::string> seen_;
};

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline Head parse_head(const std::string& s) {
    if (s == "eq") return Head::Eq;
    if (s == "tr") return Head::Tr;
    return Head::GAP;
}

struct ExperimentResult {
    std::string primary;
    std::string secondary;           // optional companion document
    std::string secondary_suffix;    // appended to the --out path
    int exit_code = 0;
};

namespace expdetail {

inline KernelParams read_kernel_params(ConfigReader& c, int def_depth, int def_filter,
                                       int def_pixels, int def_channels) {
    KernelParams kp;
    kp.depth = static_cast<int>(c.get_int("L", def_depth, 1, 4096));
    kp.filter = static_cast<int>(c.get_int("q", def_filter, 1, 99));
    kp.pixels = static_cast<int>(c.get_int("d", def_pixels, 1, 4096));
    kp.channels = static_cast<int>(c.get_int("C0", def_channels, 2, 4096));
    kp.alpha = c.get_double("alpha", 1.0, 0.0, 100.0);
    kp.head = parse_head(c.get_enum("head", "eq", {"eq", "tr", "gap"}));
    return kp;
}

inline void validate_kp(const KernelParams& kp) {
    // Range checks happen at read time; the cross-field filter constraints
    // are the only ones left to attribute.
    if (kp.filter % 2 == 0) throw ConfigError("q", "must be odd");
    if (kp.filter > kp.pixels) throw ConfigError("q", "must not exceed d");
    kp.validate();
}

inline double normalized_general(double (*kfn)(const InputSignal&, const InputSignal&,
                                               const KernelParams&),
                                 const InputSignal& x, const InputSignal& z,
                                 const KernelParams& kp) {
    return normalize(kfn(x, z, kp), kfn(x, x, kp), kfn(z, z, kp));
}

}  // namespace expdetail

// ---- eval ------------------------------------------------------------------

inline ExperimentResult run_eval(const nlohmann::json& cfg) {
    ConfigReader c(cfg);
    const std::string kind =
        c.get_enum("kernel", "rescgpk", {"rescgpk", "rescntk", "cgpk", "cntk", "appendix-h"});
    KernelParams kp = expdetail::read_kernel_params(c, 1, kind == "appendix-h" ? 2 : 3, 4, 3);
    const bool normalized = c.get_bool("normalized", true);
    const double beta = c.get_double("beta", 1.0, 0.0, 1.0);
    std::vector<double> tdef(static_cast<std::size_t>(kp.pixels), 1.0);
    const std::vector<double> tv = c.get_double_array("t", tdef, -1.0, 1.0);
    c.get_seed(1);
    c.finish();
    if (static_cast<int>(tv.size()) != kp.pixels)
        throw ConfigError("t", "must have d entries");

    kp.skip = kind == "rescgpk" || kind == "rescntk";
    double value = 0.0;
    if (kind == "appendix-h") {
        if (kp.filter != 2) throw ConfigError("q", "appendix-h kernel requires q = 2");
        if (beta != 0.0 && beta != 1.0) throw ConfigError("beta", "must be 0 or 1");
        if (!normalized) throw ConfigError("normalized", "appendix-h kernel is normalized only");
        value = cgpk_appendix_h(CosineVector(tv), kp, beta);
    } else {
        expdetail::validate_kp(kp);
        const CosineVector t(tv);
        auto [x, z] = realize_pair(t, kp.channels);
        const bool ntk = kind == "rescntk" || kind == "cntk";
        if (normalized)
            value = ntk ? expdetail::normalized_general(&rescntk, x, z, kp)
                        : expdetail::normalized_general(&rescgpk, x, z, kp);
        else
            value = ntk ? rescntk(x, z, kp) : rescgpk(x, z, kp);
    }

    ExperimentResult r;
    r.primary = "kernel,head,normalized,value\n" + kind + "," + head_name(kp.head) + "," +
                (normalized ? "1" : "0") + "," + fmt(value) + "\n";
    return r;
}

// ---- gram ------------------------------------------------------------------

inline ExperimentResult run_gram(const nlohmann::json& cfg) {
    ConfigReader c(cfg);
    const std::string kind = c.get_enum("kernel", "rescgpk", {"rescgpk", "rescntk", "cgpk", "cntk"});
    KernelParams kp = expdetail::read_kernel_params(c, 3, 3, 8, 3);
    kp.head = parse_head(c.get_enum("head", "tr", {"eq", "tr", "gap"}));
    const int n = static_cast<int>(c.get_int("n", 8, 1, 2000));
    const std::uint64_t seed = c.get_seed(1);
    c.finish();
    kp.skip = kind == "rescgpk" || kind == "rescntk";
    expdetail::validate_kp(kp);

    ExperimentResult r;
    if (n == 1) {
        r.primary = "1\n";
        return r;
    }
    const auto points = sample_multisphere(n, kp.channels, kp.pixels, seed);
    const bool ntk = kind == "rescntk" || kind == "cntk";
    KernelFn fn = [&, ntk](const InputSignal& a, const InputSignal& b) {
        return ntk ? expdetail::normalized_general(&rescntk, a, b, kp)
                   : expdetail::normalized_general(&rescgpk, a, b, kp);
    };
    const GramMatrix g = gram(points, fn);
    std::string out;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out += fmt(g.a(i, j));
            out += j + 1 == n ? '\n' : ',';
        }
    }
    r.primary = std::move(out);
    return r;
}

// ---- eig -------------------------------------------------------------------

struct EigPattern {
    std::string name;
    std::vector<int> mask;  // 1 where the frequency is active
    int active = 0;
};

inline std::vector<EigPattern> default_eig_patterns(int d) {
    std::vector<EigPattern> out;
    for (int m = 1; m <= d; ++m) {
        EigPattern p;
        p.mask.assign(static_cast<std::size_t>(d), 0);
        for (int i = 0; i < m; ++i) {
            p.mask[static_cast<std::size_t>(i)] = 1;
            p.name += 'k';
        }
        for (int i = m; i < d; ++i) p.name += '0';
        p.active = m;
        out.push_back(std::move(p));
    }
    if (d >= 3) {
        EigPattern far;
        far.mask.assign(static_cast<std::size_t>(d), 0);
        far.mask[0] = 1;
        far.mask[2] = 1;
        far.active = 2;
        for (int i = 0; i < d; ++i) far.name += far.mask[static_cast<std::size_t>(i)] ? 'k' : '0';
        out.push_back(std::move(far));
    }
    return out;
}

inline ExperimentResult run_eig(const nlohmann::json& cfg, int threads = 1) {
    ConfigReader c(cfg);
    const int depth = static_cast<int>(c.get_int("L", 3, 1, 64));
    const int d = static_cast<int>(c.get_int("d", 4, 2, 6));
    const int c0 = static_cast<int>(c.get_int("C0", 3, 2, 64));
    const int nodes = static_cast<int>(c.get_int("nodes", 48, 2, 256));
    const int kmin = static_cast<int>(c.get_int("kmin", 3, 1, 64));
    const int kmax = static_cast<int>(c.get_int("kmax", 10, 1, 64));
    const long long q = c.get_int("q", 2, 2, 2);
    c.get_seed(1);
    c.finish();
    (void)q;
    if (kmin > kmax) throw ConfigError("kmin", "must not exceed kmax");
    if (nodes < kmax + 1) throw ConfigError("nodes", "grid too coarse for kmax");

    const QuadratureGrid grid = make_quadrature_grid(nodes, c0);
    const auto patterns = default_eig_patterns(d);

    std::vector<FrequencyMultiIndex> indices;
    for (const auto& p : patterns)
        for (int k = kmin; k <= kmax; ++k) {
            FrequencyMultiIndex idx(static_cast<std::size_t>(d), 0);
            for (int i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = p.mask[static_cast<std::size_t>(i)] * k;
            indices.push_back(std::move(idx));
        }

    std::string csv = "beta,pattern,k,lambda,tolerance\n";
    nlohmann::json slopes;
    for (double beta : {0.0, 1.0}) {
        MultiDotKernel kern = [depth, beta](const std::vector<double>& t) {
            return cgpk_appendix_h_shifts(CosineVector(t), depth, beta)[0];
        };
        const auto est = eigenvalues_batch(kern, indices, grid, threads);
        const std::string bkey = beta == 0.0 ? "beta0" : "beta1";
        std::size_t at = 0;
        for (const auto& p : patterns) {
            std::vector<std::pair<int, double>> fitpairs;
            for (int k = kmin; k <= kmax; ++k, ++at) {
                const auto& e = est[at];
                csv += bkey + "," + p.name + "," + std::to_string(k) + "," + fmt(e.lambda) + "," +
                       fmt(e.abs_tolerance) + "\n";
                if (e.lambda >= 1e-13) fitpairs.emplace_back(k, e.lambda);
            }
            if (fitpairs.size() >= 3) {
                const SlopeFit fit = decay_slope(fitpairs);
                slopes[bkey][p.name] = {
                    {"exponent", fit.exponent},
                    {"intercept", fit.intercept},
                    {"r_squared", fit.r_squared},
                    {"points", fitpairs.size()},
                    {"sandwich_pass",
                     theorem_sandwich_check(fit.exponent, c0, SpectralKind::GPK, p.active, d)}};
            } else {
                slopes[bkey][p.name] = {{"points", fitpairs.size()}};
            }
        }
    }

    ExperimentResult r;
    r.primary = std::move(csv);
    r.secondary = slopes.dump(2) + "\n";
    r.secondary_suffix = ".slopes.json";
    return r;
}

// ---- cond ------------------------------------------------------------------

inline ExperimentResult run_cond(const nlohmann::json& cfg) {
    ConfigReader c(cfg);
    KernelParams kp = expdetail::read_kernel_params(c, 30, 3, 8, 3);
    const int n = static_cast<int>(c.get_int("n", 100, 2, 2000));
    const int lmin = static_cast<int>(c.get_int("Lmin", 2, 1, 4096));
    const int lmax = static_cast<int>(c.get_int("Lmax", 30, 1, 4096));
    const std::uint64_t seed = c.get_seed(1);
    c.finish();
    if (lmax < lmin) throw ConfigError("Lmax", "must be >= Lmin");
    kp.depth = lmax;
    kp.head = Head::Tr;
    expdetail::validate_kp(kp);

    const auto points = sample_multisphere(n, kp.channels, kp.pixels, seed);
    const auto rows = depth_sweep(points, lmin, lmax, kp);

    std::string csv = "L,kernel_kind,rho_actual,rho_lower,rho_upper,epsilon,b,l1_gap\n";
    for (const auto& row : rows) {
        csv += std::to_string(row.depth);
        csv += row.kind == TraceKernelKind::ResCGPK ? ",rescgpk," : ",cgpk,";
        csv += fmt(row.report.rho_actual) + "," + fmt(row.report.rho_lower) + ",";
        if (row.report.valid_upper) csv += fmt(row.report.rho_upper);
        csv += "," + fmt(row.report.epsilon) + "," + fmt(row.report.b) + "," + fmt(row.l1) + "\n";
    }
    ExperimentResult r;
    r.primary = std::move(csv);
    return r;
}

// ---- erf -------------------------------------------------------------------

// Central-difference sensitivity of the tangent kernel's self-value to each
// input entry, aggregated per pixel as an L2 norm and rescaled to [0,1].
// Perturbations leave the multi-sphere; the general-input kernel is exact off
// the sphere, and projecting back would cancel the radial derivative that
// carries the signal.
inline std::vector<double> erf_profile(const InputSignal& x, const KernelParams& kp, double step) {
    std::vector<double> per_pixel(static_cast<std::size_t>(kp.pixels), 0.0);
    for (int p = 0; p < kp.pixels; ++p) {
        double acc = 0.0;
        for (int ch = 0; ch < kp.channels; ++ch) {
            InputSignal plus = x;
            InputSignal minus = x;
            plus.at(ch, p) += step;
            minus.at(ch, p) -= step;
            plus.on_multisphere = false;
            minus.on_multisphere = false;
            const double g = (rescntk(plus, plus, kp) - rescntk(minus, minus, kp)) / (2.0 * step);
            acc += g * g;
        }
        per_pixel[static_cast<std::size_t>(p)] = std::sqrt(acc);
    }
    double mx = 0.0;
    for (double v : per_pixel) mx = std::max(mx, v);
    if (mx > 0.0)
        for (double& v : per_pixel) v /= mx;
    return per_pixel;
}

inline ExperimentResult run_erf(const nlohmann::json& cfg) {
    ConfigReader c(cfg);
    KernelParams kp = expdetail::read_kernel_params(c, 8, 3, 9, 3);
    const double step = c.get_double("step", 1e-4, 1e-8, 1e-1);
    const std::uint64_t seed = c.get_seed(1);
    c.finish();
    kp.head = Head::Eq;
    expdetail::validate_kp(kp);

    const InputSignal x = sample_multisphere(1, kp.channels, kp.pixels, seed).front();
    KernelParams res = kp, plain = kp;
    res.skip = true;
    plain.skip = false;
    const auto e_res = erf_profile(x, res, step);
    const auto e_plain = erf_profile(x, plain, step);

    std::string csv = "pixel,erf_rescntk,erf_cntk\n";
    for (int p = 0; p < kp.pixels; ++p)
        csv += std::to_string(p + 1) + "," + fmt(e_res[static_cast<std::size_t>(p)]) + "," +
               fmt(e_plain[static_cast<std::size_t>(p)]) + "\n";
    ExperimentResult r;
    r.primary = std::move(csv);
    return r;
}

// ---- depth-limit -----------------------------------------------------------

inline ExperimentResult run_depth_limit(const nlohmann::json& cfg) {
    ConfigReader c(cfg);
    KernelParams kp = expdetail::read_kernel_params(c, 1, 3, 4, 3);
    const double gamma = c.get_double("gamma", 0.75, 0.5 + 1e-9, 1.0);
    const auto depths = c.get_int_array("Ls", {16, 64, 256, 1024}, 1, 1 << 20);
    const auto gridvals = c.get_double_array("grid", {-0.9, 0.0, 0.9}, -1.0, 1.0);
    c.get_seed(1);
    c.finish();

    std::string csv = "L,alpha,gpk_dev,ntk_dev\n";
    for (long long L : depths) {
        KernelParams p = kp;
        p.depth = static_cast<int>(L);
        p.alpha = std::pow(static_cast<double>(L), -gamma);
        expdetail::validate_kp(p);

        const std::vector<double> ones(static_cast<std::size_t>(p.pixels), 1.0);
        const double ntk_self = rescntk_t(CosineVector(ones), p);

        double gdev = 0.0, ndev = 0.0;
        std::vector<std::size_t> idx(static_cast<std::size_t>(p.pixels), 0);
        const std::size_t total =
            static_cast<std::size_t>(std::pow(static_cast<double>(gridvals.size()), p.pixels) + 0.5);
        for (std::size_t it = 0; it < total; ++it) {
            std::vector<double> tv(static_cast<std::size_t>(p.pixels));
            for (int j = 0; j < p.pixels; ++j) tv[static_cast<std::size_t>(j)] = gridvals[idx[static_cast<std::size_t>(j)]];
            const CosineVector t(tv);
            gdev = std::max(gdev, std::abs(rescgpk_multisphere_normalized(t, p) - t[0]));
            ndev = std::max(ndev, std::abs(rescntk_t(t, p) / ntk_self - t[0]));
            for (int j = p.pixels - 1; j >= 0; --j) {
                if (++idx[static_cast<std::size_t>(j)] < gridvals.size()) break;
                idx[static_cast<std::size_t>(j)] = 0;
            }
        }
        csv += std::to_string(L) + "," + fmt(p.alpha) + "," + fmt(gdev) + "," + fmt(ndev) + "\n";
    }
    ExperimentResult r;
    r.primary = std::move(csv);
    return r;
}

// ---- mc-validate -----------------------------------------------------------

struct McPairReport {
    double analytic_gpk = 0.0, analytic_ntk = 0.0;
    MCEstimate gpk, ntk;
    double z_gpk = 0.0, z_ntk = 0.0;
};

// Shared-draw Monte Carlo validation: one network sample serves every pair,
// so the weight-sampling cost is paid once per draw.
inline std::vector<McPairReport> mc_validate_pairs(
    const std::vector<std::pair<InputSignal, InputSignal>>& pairs, const NetworkConfig& cfg,
    int samples, int threads) {
    const std::size_t np = pairs.size();
    std::vector<std::vector<double>> gpk_vals(np, std::vector<double>(static_cast<std::size_t>(samples)));
    std::vector<std::vector<double>> ntk_vals(np, std::vector<double>(static_cast<std::size_t>(samples)));

    parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t i) {
        const NetworkParams npar = sample_network(cfg, static_cast<std::uint64_t>(i));
        for (std::size_t pi = 0; pi < np; ++pi) {
            const ForwardCache fx = forward(pairs[pi].first, npar, cfg);
            const ForwardCache fz = forward(pairs[pi].second, npar, cfg);
            const BackwardCache bx = backward(fx, npar, cfg);
            const BackwardCache bz = backward(fz, npar, cfg);
            gpk_vals[pi][i] = fx.output * fz.output;
            ntk_vals[pi][i] = ntk_dot_cached(fx, bx, fz, bz, cfg);
        }
    });

    auto summarize = [samples](const std::vector<double>& v) {
        MCEstimate e;
        e.samples = samples;
        e.mean = pairwise_sum(v) / samples;
        double var = 0.0;
        for (double x : v) var += (x - e.mean) * (x - e.mean);
        e.std_error = std::sqrt(var / (samples - 1) / samples);
        return e;
    };

    std::vector<McPairReport> out(np);
    for (std::size_t pi = 0; pi < np; ++pi) {
        out[pi].analytic_gpk = rescgpk(pairs[pi].first, pairs[pi].second, cfg.kp);
        out[pi].analytic_ntk = rescntk(pairs[pi].first, pairs[pi].second, cfg.kp);
        out[pi].gpk = summarize(gpk_vals[pi]);
        out[pi].ntk = summarize(ntk_vals[pi]);
        out[pi].z_gpk = (out[pi].gpk.mean - out[pi].analytic_gpk) / out[pi].gpk.std_error;
        out[pi].z_ntk = (out[pi].ntk.mean - out[pi].analytic_ntk) / out[pi].ntk.std_error;
    }
    return out;
}

inline ExperimentResult run_mc_validate(const nlohmann::json& cfg, int threads = 1) {
    ConfigReader c(cfg);
    KernelParams kp = expdetail::read_kernel_params(c, 2, 3, 6, 3);
    kp.skip = c.get_bool("skip", true);
    const int width = static_cast<int>(c.get_int("width", 512, 1, 65536));
    const int samples = static_cast<int>(c.get_int("samples", 1000, 2, 1000000));
    const int npairs = static_cast<int>(c.get_int("pairs", 10, 1, 1000));
    const std::uint64_t seed = c.get_seed(1);
    c.finish();
    expdetail::validate_kp(kp);

    NetworkConfig nc;
    nc.kp = kp;
    nc.widths.assign(static_cast<std::size_t>(kp.depth), width);
    nc.seed = substream_seed(seed, 0x6d63ULL);
    nc.validate();

    const auto points = sample_multisphere(2 * npairs, kp.channels, kp.pixels, seed);
    std::vector<std::pair<InputSignal, InputSignal>> pairs;
    for (int i = 0; i < npairs; ++i)
        pairs.emplace_back(points[static_cast<std::size_t>(2 * i)], points[static_cast<std::size_t>(2 * i + 1)]);

    const auto reports = mc_validate_pairs(pairs, nc, samples, threads);

    nlohmann::json out;
    out["config"] = {{"L", kp.depth},     {"q", kp.filter},   {"d", kp.pixels},
                     {"C0", kp.channels}, {"alpha", kp.alpha}, {"head", head_name(kp.head)},
                     {"skip", kp.skip},   {"width", width},    {"samples", samples},
                     {"pairs", npairs},   {"seed", seed}};
    double max_abs_z = 0.0;
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        arr.push_back({{"pair", i},
                       {"analytic_gpk", r.analytic_gpk},
                       {"mc_gpk", r.gpk.mean},
                       {"gpk_std_error", r.gpk.std_error},
                       {"gpk_z", r.z_gpk},
                       {"analytic_ntk", r.analytic_ntk},
                       {"mc_ntk", r.ntk.mean},
                       {"ntk_std_error", r.ntk.std_error},
                       {"ntk_z", r.z_ntk}});
        max_abs_z = std::max({max_abs_z, std::abs(r.z_gpk), std::abs(r.z_ntk)});
    }
    out["results"] = arr;
    out["max_abs_z"] = max_abs_z;

    ExperimentResult res;
    res.primary = out.dump(2) + "\n";
    res.exit_code = max_abs_z > 4.0 ? 1 : 0;
    return res;
}

}  // namespace reskern
