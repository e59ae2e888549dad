#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "reskern/experiments.hpp"
#include "reskern/parallel.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    long long seed = -1;
    int threads = 0;
};

void add_common(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--config", o.config_path, "JSON config file (flat key-value)")->required();
    sub->add_option("--out", o.out_path, "output path (default: stdout)");
    sub->add_option("--seed", o.seed, "override the config seed");
    sub->add_option("--threads", o.threads, "cap worker threads (default: hardware)");
}

nlohmann::json load_config(const CommonOpts& o) {
    std::ifstream in(o.config_path);
    if (!in) throw reskern::ConfigError("<config>", "cannot open " + o.config_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw reskern::ConfigError("<config>", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw reskern::ConfigError("<config>", "config must be a JSON object");
    if (o.seed >= 0) j["seed"] = o.seed;
    return j;
}

int emit(const reskern::ExperimentResult& r, const CommonOpts& o) {
    if (o.out_path.empty()) {
        std::cout << r.primary;
        if (!r.secondary.empty()) std::cout << r.secondary;
    } else {
        std::ofstream out(o.out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << o.out_path << "\n";
            return 1;
        }
        out << r.primary;
        if (!r.secondary.empty()) {
            std::ofstream side(o.out_path + r.secondary_suffix, std::ios::binary);
            if (!side) {
                std::cerr << "error: cannot write " << o.out_path + r.secondary_suffix << "\n";
                return 1;
            }
            side << r.secondary;
        }
    }
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reskern: exact GPK/NTK kernels of convolutional ResNets and their experiments"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto* eval = app.add_subcommand("eval", "evaluate one kernel at a cosine vector (CSV)");
    auto* gram = app.add_subcommand("gram", "Gram matrix of a normalized kernel on sampled points (CSV)");
    auto* eig = app.add_subcommand("eig", "eigenvalue decay and slope fits, beta 0 and 1 (CSV + JSON)");
    auto* cond = app.add_subcommand("cond", "condition-number depth sweep, residual vs plain (CSV)");
    auto* mcv = app.add_subcommand("mc-validate", "finite-width Monte Carlo vs analytic kernels (JSON)");
    auto* erf = app.add_subcommand("erf", "effective receptive field of the tangent kernels (CSV)");
    auto* dl = app.add_subcommand("depth-limit", "deep-network limit under decaying balance (CSV)");
    for (auto* s : {eval, gram, eig, cond, mcv, erf, dl}) add_common(s, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        const nlohmann::json cfg = load_config(opts);
        const int threads = opts.threads > 0 ? opts.threads : reskern::default_threads();
        reskern::ExperimentResult r;
        if (eval->parsed()) r = reskern::run_eval(cfg);
        else if (gram->parsed()) r = reskern::run_gram(cfg);
        else if (eig->parsed()) r = reskern::run_eig(cfg, threads);
        else if (cond->parsed()) r = reskern::run_cond(cfg);
        else if (mcv->parsed()) r = reskern::run_mc_validate(cfg, threads);
        else if (erf->parsed()) r = reskern::run_erf(cfg);
        else r = reskern::run_depth_limit(cfg);
        return emit(r, opts);
    } catch (const reskern::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
