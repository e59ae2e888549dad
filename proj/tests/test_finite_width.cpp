#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "reskern/finite_width.hpp"
#include "reskern/general.hpp"
#include "reskern/rng.hpp"

using namespace reskern;

namespace {

NetworkConfig make_config(int L, int q, int d, int c0, int width, Head head = Head::Eq,
                          double alpha = 1.0, bool skip = true, std::uint64_t seed = 1) {
    NetworkConfig cfg;
    cfg.kp.depth = L;
    cfg.kp.filter = q;
    cfg.kp.pixels = d;
    cfg.kp.channels = c0;
    cfg.kp.alpha = alpha;
    cfg.kp.head = head;
    cfg.kp.skip = skip;
    cfg.widths.assign(static_cast<std::size_t>(L), width);
    cfg.seed = seed;
    return cfg;
}

void fill_ones(std::vector<double>& v) { v.assign(v.size(), 1.0); }

NetworkParams all_ones(const NetworkConfig& cfg) {
    NetworkParams p = sample_network(cfg, 0);
    fill_ones(p.v0);
    fill_ones(p.w1);
    for (auto& t : p.w) fill_ones(t);
    for (auto& t : p.v) fill_ones(t);
    fill_ones(p.head);
    return p;
}

double flat_perturb_output(const InputSignal& x, NetworkParams p, const NetworkConfig& cfg,
                           std::size_t index, double delta) {
    std::vector<std::vector<double>*> blocks;
    blocks.push_back(&p.w1);
    for (int l = 2; l <= cfg.kp.depth; ++l) blocks.push_back(&p.w[static_cast<std::size_t>(l - 1)]);
    for (int l = 1; l <= cfg.kp.depth; ++l) blocks.push_back(&p.v[static_cast<std::size_t>(l - 1)]);
    blocks.push_back(&p.head);
    for (auto* b : blocks) {
        if (index < b->size()) {
            (*b)[index] += delta;
            break;
        }
        index -= b->size();
    }
    return forward(x, p, cfg).output;
}

std::size_t trainable_count(const Gradients& g) {
    std::size_t n = g.w1.size() + g.head.size();
    for (const auto& t : g.w) n += t.size();
    for (const auto& t : g.v) n += t.size();
    return n;
}

double flat_entry(const Gradients& g, std::size_t index) {
    std::vector<const std::vector<double>*> blocks;
    blocks.push_back(&g.w1);
    for (const auto& t : g.w)
        if (!t.empty()) blocks.push_back(&t);
    for (const auto& t : g.v) blocks.push_back(&t);
    blocks.push_back(&g.head);
    for (const auto* b : blocks) {
        if (index < b->size()) return (*b)[index];
        index -= b->size();
    }
    return 0.0;
}

}  // namespace

TEST_CASE("unit-weight single-pixel forward trace") {
    const NetworkConfig cfg = make_config(1, 1, 1, 2, 1);
    const NetworkParams p = all_ones(cfg);
    InputSignal x(2, 1);
    x.at(0, 0) = 1.0;
    x.at(1, 0) = 1.0;
    const ForwardCache fc = forward(x, p, cfg);
    // f0 = g1 = sqrt(2); f1 = sqrt(2) + sqrt(2) * relu(sqrt(2)); Eq head reads f1.
    const double f0 = std::sqrt(2.0);
    const double expected = f0 + std::sqrt(2.0) * f0;
    CHECK(fc.output == Catch::Approx(expected).margin(1e-13));
}

TEST_CASE("positive homogeneity of the forward pass") {
    const NetworkConfig cfg = make_config(3, 3, 5, 3, 6, Head::Tr);
    const NetworkParams p = sample_network(cfg, 4);
    const InputSignal x = sample_multisphere(1, 3, 5, 5).front();
    InputSignal sx = x;
    for (double& v : sx.x) v *= 2.5;
    sx.on_multisphere = false;
    const double base = forward(x, p, cfg).output;
    const double scaled = forward(sx, p, cfg).output;
    CHECK(scaled == Catch::Approx(2.5 * base).margin(1e-10 * std::abs(base) + 1e-12));
}

TEST_CASE("zero input produces zero output and zero gradients") {
    const NetworkConfig cfg = make_config(2, 3, 4, 3, 5);
    const NetworkParams p = sample_network(cfg, 2);
    InputSignal zero(3, 4);
    const ForwardCache fc = forward(zero, p, cfg);
    CHECK(fc.output == 0.0);
    const Gradients g = grad_params(zero, p, cfg);
    for (std::size_t i = 0; i < trainable_count(g); ++i) CHECK(flat_entry(g, i) == 0.0);
}

TEST_CASE("head-weight gradient equals the scaled top activations") {
    const InputSignal x = sample_multisphere(1, 3, 4, 6).front();
    for (Head head : {Head::Eq, Head::Tr, Head::GAP}) {
        const NetworkConfig cfg = make_config(2, 3, 4, 3, 5, head);
        const NetworkParams p = sample_network(cfg, 3);
        const ForwardCache fc = forward(x, p, cfg);
        const Gradients g = grad_params(x, p, cfg);
        const int cl = 5, d = 4;
        if (head == Head::Eq) {
            for (int i = 0; i < cl; ++i)
                CHECK(g.head[static_cast<std::size_t>(i)] ==
                      Catch::Approx(fc.f[2].row(0)[i] / std::sqrt(5.0)).margin(1e-13));
        } else if (head == Head::Tr) {
            for (int pix = 0; pix < d; ++pix)
                for (int i = 0; i < cl; ++i)
                    CHECK(g.head[static_cast<std::size_t>(pix) * cl + i] ==
                          Catch::Approx(fc.f[2].row(pix)[i] / (std::sqrt(4.0) * std::sqrt(5.0))).margin(1e-13));
        } else {
            for (int i = 0; i < cl; ++i) {
                double s = 0.0;
                for (int pix = 0; pix < d; ++pix) s += fc.f[2].row(pix)[i];
                CHECK(g.head[static_cast<std::size_t>(i)] ==
                      Catch::Approx(s / (4.0 * std::sqrt(5.0))).margin(1e-13));
            }
        }
    }
}

TEST_CASE("reverse-mode gradients match central finite differences") {
    const InputSignal x = sample_multisphere(1, 3, 5, 12).front();
    for (bool skip : {true, false}) {
        for (Head head : {Head::Eq, Head::Tr, Head::GAP}) {
            const NetworkConfig cfg = make_config(3, 3, 5, 3, 4, head, 1.0, skip, 17);
            const NetworkParams p = sample_network(cfg, 1);
            const Gradients g = grad_params(x, p, cfg);
            const std::size_t n = trainable_count(g);
            const double h = 1e-5;
            double gmax = 0.0;
            for (std::size_t i = 0; i < n; ++i) gmax = std::max(gmax, std::abs(flat_entry(g, i)));
            for (std::size_t i = 0; i < n; ++i) {
                const double up = flat_perturb_output(x, p, cfg, i, h);
                const double dn = flat_perturb_output(x, p, cfg, i, -h);
                const double fd = (up - dn) / (2.0 * h);
                const double an = flat_entry(g, i);
                const double scale = std::max({std::abs(fd), std::abs(an), 1e-3 * gmax});
                if (scale > 0.0) CHECK(std::abs(fd - an) / scale <= 1e-6);
            }
        }
    }
}

TEST_CASE("pairwise tangent dot agrees with materialized gradients") {
    const auto pts = sample_multisphere(2, 3, 4, 31);
    for (bool skip : {true, false}) {
        for (Head head : {Head::Eq, Head::Tr, Head::GAP}) {
            const NetworkConfig cfg = make_config(2, 3, 4, 3, 6, head, 0.8, skip, 23);
            const NetworkParams p = sample_network(cfg, 5);
            const Gradients gx = grad_params(pts[0], p, cfg);
            const Gradients gz = grad_params(pts[1], p, cfg);
            const double direct = gx.dot(gz);
            const double fast = ntk_pair_dot(pts[0], pts[1], p, cfg);
            CHECK(fast == Catch::Approx(direct).epsilon(1e-10));
        }
    }
}

TEST_CASE("Monte Carlo GP estimate on the diagonal is nonnegative and deterministic") {
    const NetworkConfig cfg = make_config(2, 3, 4, 3, 8, Head::Eq, 1.0, true, 99);
    const InputSignal x = sample_multisphere(1, 3, 4, 55).front();
    const MCEstimate a = mc_gpk(x, x, cfg, 32, 1);
    const MCEstimate b = mc_gpk(x, x, cfg, 32, 2);
    CHECK(a.mean >= 0.0);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("finite-width GP kernel approaches the analytic one as width grows") {
    const auto pts = sample_multisphere(2, 3, 4, 71);
    KernelParams kp;
    kp.depth = 2;
    kp.filter = 3;
    kp.pixels = 4;
    kp.channels = 3;
    const double analytic = rescgpk(pts[0], pts[1], kp);

    double prev = 1e30;
    for (int width : {16, 64, 256}) {
        double dev = 0.0;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            NetworkConfig cfg = make_config(2, 3, 4, 3, width, Head::Eq, 1.0, true, 1000 + seed);
            const MCEstimate e = mc_gpk(pts[0], pts[1], cfg, 200, 2);
            dev += std::abs(e.mean - analytic);
        }
        dev /= 5.0;
        CHECK(dev < prev);
        prev = dev;
    }
}

TEST_CASE("empirical trace kernel matches the shift-averaged equivariant one") {
    const auto pts = sample_multisphere(2, 3, 3, 13);
    const int samples = 400;
    NetworkConfig tr_cfg = make_config(2, 3, 3, 3, 64, Head::Tr, 1.0, true, 7);
    const MCEstimate tr = mc_gpk(pts[0], pts[1], tr_cfg, samples, 2);

    NetworkConfig eq_cfg = tr_cfg;
    eq_cfg.kp.head = Head::Eq;
    double mean = 0.0, se = 0.0;
    for (int j = 0; j < 3; ++j) {
        const MCEstimate e =
            mc_gpk(shift_signal(pts[0], j), shift_signal(pts[1], j), eq_cfg, samples, 2);
        mean += e.mean / 3.0;
        se += e.std_error / 3.0;
    }
    CHECK(std::abs(tr.mean - mean) <= 3.0 * (tr.std_error + se));
}

TEST_CASE("analytic tangent kernel sits inside the Monte Carlo band at moderate width") {
    const auto pts = sample_multisphere(2, 3, 3, 83);
    KernelParams kp;
    kp.depth = 2;
    kp.filter = 3;
    kp.pixels = 3;
    kp.channels = 3;
    const NetworkConfig cfg = make_config(2, 3, 3, 3, 256, Head::Eq, 1.0, true, 29);
    const MCEstimate e = mc_ntk(pts[0], pts[1], cfg, 300, 2);
    const double analytic = rescntk(pts[0], pts[1], kp);
    CHECK(std::abs(e.mean - analytic) <=
          std::max(4.0 * e.std_error, 0.08 * std::abs(analytic)));
}

TEST_CASE("network config validation") {
    NetworkConfig cfg = make_config(2, 3, 4, 3, 8);
    cfg.widths = {8};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.widths = {8, 16};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // skip needs equal widths
    cfg.kp.skip = false;
    CHECK_NOTHROW(cfg.validate());
}
