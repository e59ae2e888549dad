#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "reskern/parallel.hpp"
#include "reskern/rng.hpp"
#include "reskern/types.hpp"

namespace reskern {

// Finite-width network mirroring the kernel architecture. With skip
// connections every hidden width must match, since the identity branch adds
// activations across layers.
struct NetworkConfig {
    KernelParams kp;
    std::vector<int> widths;
    std::uint64_t seed = 0;

    void validate() const {
        kp.validate();
        if (static_cast<int>(widths.size()) != kp.depth)
            throw std::invalid_argument("NetworkConfig: widths must have one entry per layer");
        for (int w : widths)
            if (w < 1) throw std::invalid_argument("NetworkConfig: widths must be >= 1");
        if (kp.skip) {
            for (int w : widths)
                if (w != widths.front())
                    throw std::invalid_argument("NetworkConfig: skip connections need equal widths");
        }
    }

    int width(int l) const { return widths[static_cast<std::size_t>(l - 1)]; }  // l = 1..L
};

// Sampled weights. v0 is the fixed input embedding and is excluded from the
// tangent kernel; everything else is trainable. Filters of the first layer
// have size 1. Head weights are stored pixel-major for the Tr head.
struct NetworkParams {
    std::vector<double> v0;               // C0 x C1
    std::vector<double> w1;               // C0 x C1
    std::vector<std::vector<double>> w;   // l = 2..L: q x C_{l-1} x C_l, [(m*Cin + j)*Cout + i]
    std::vector<std::vector<double>> v;   // l = 1..L: q x C_l x C_l
    std::vector<double> head;             // Eq/GAP: C_L; Tr: d x C_L, [p*C_L + i]
};

inline NetworkParams sample_network(const NetworkConfig& cfg, std::uint64_t draw_index) {
    cfg.validate();
    NormalStream g(substream_seed(cfg.seed, draw_index));
    const int c0 = cfg.kp.channels;
    const int q = cfg.kp.filter;
    const int d = cfg.kp.pixels;
    const int L = cfg.kp.depth;

    NetworkParams p;
    p.v0.resize(static_cast<std::size_t>(c0) * cfg.width(1));
    p.w1.resize(static_cast<std::size_t>(c0) * cfg.width(1));
    g.fill(p.v0.data(), p.v0.size());
    g.fill(p.w1.data(), p.w1.size());

    p.w.resize(static_cast<std::size_t>(L));  // slot 0 unused (layer 1 filter is w1)
    p.v.resize(static_cast<std::size_t>(L));
    for (int l = 2; l <= L; ++l) {
        p.w[static_cast<std::size_t>(l - 1)].resize(static_cast<std::size_t>(q) * cfg.width(l - 1) * cfg.width(l));
        g.fill(p.w[static_cast<std::size_t>(l - 1)].data(), p.w[static_cast<std::size_t>(l - 1)].size());
    }
    for (int l = 1; l <= L; ++l) {
        p.v[static_cast<std::size_t>(l - 1)].resize(static_cast<std::size_t>(q) * cfg.width(l) * cfg.width(l));
        g.fill(p.v[static_cast<std::size_t>(l - 1)].data(), p.v[static_cast<std::size_t>(l - 1)].size());
    }
    const int cl = cfg.width(L);
    p.head.resize(cfg.kp.head == Head::Tr ? static_cast<std::size_t>(d) * cl : static_cast<std::size_t>(cl));
    g.fill(p.head.data(), p.head.size());
    return p;
}

namespace fwdetail {

inline int wrap(int i, int d) { return ((i % d) + d) % d; }

// Pixel-major activation block: a[p*channels + c].
struct Block {
    int pixels = 0;
    int channels = 0;
    std::vector<double> a;
    Block() = default;
    Block(int d, int c) : pixels(d), channels(c), a(static_cast<std::size_t>(d) * c, 0.0) {}
    double* row(int p) { return a.data() + static_cast<std::size_t>(p) * channels; }
    const double* row(int p) const { return a.data() + static_cast<std::size_t>(p) * channels; }
};

// out[p,:] += scale * sum_j sum_m T[m,j,:] in[p+m, j], circular in p.
inline void conv(const std::vector<double>& filt, int q, const Block& in, Block& out, double scale) {
    const int d = in.pixels;
    const int cin = in.channels;
    const int cout = out.channels;
    const int h = (q - 1) / 2;
    for (int p = 0; p < d; ++p) {
        double* op = out.row(p);
        for (int m = -h; m <= h; ++m) {
            const double* ip = in.row(wrap(p + m, d));
            const double* f = filt.data() + static_cast<std::size_t>(m + h) * cin * cout;
            for (int j = 0; j < cin; ++j) {
                const double xv = scale * ip[j];
                if (xv == 0.0) continue;
                const double* fr = f + static_cast<std::size_t>(j) * cout;
                for (int i = 0; i < cout; ++i) op[i] += xv * fr[i];
            }
        }
    }
}

// Adjoint: out[p,:] += scale * sum_i sum_m T[m,:,i] in[p-m, i].
inline void conv_transpose(const std::vector<double>& filt, int q, const Block& in, Block& out,
                           double scale) {
    const int d = in.pixels;
    const int cin = out.channels;   // filter input side
    const int cout = in.channels;   // filter output side
    const int h = (q - 1) / 2;
    for (int p = 0; p < d; ++p) {
        double* op = out.row(p);
        for (int m = -h; m <= h; ++m) {
            const double* ip = in.row(wrap(p + m, d));  // in at pixel p+m, filter offset m
            const double* f = filt.data() + static_cast<std::size_t>(h - m) * cin * cout;
            // (p+m) - m = p: filter tap for output pixel p+m reading input p is -m.
            for (int j = 0; j < cin; ++j) {
                const double* fr = f + static_cast<std::size_t>(j) * cout;
                double s = 0.0;
                for (int i = 0; i < cout; ++i) s += fr[i] * ip[i];
                op[j] += scale * s;
            }
        }
    }
}

inline Block to_block(const InputSignal& x) {
    Block b(x.pixels, x.channels);
    for (int p = 0; p < x.pixels; ++p)
        for (int c = 0; c < x.channels; ++c) b.row(p)[c] = x.at(c, p);
    return b;
}

inline void dense_embed(const std::vector<double>& filt, const Block& in, Block& out, double scale) {
    // 1x1 convolution (the input embedding and first-layer filter).
    const int cin = in.channels, cout = out.channels;
    for (int p = 0; p < in.pixels; ++p) {
        const double* ip = in.row(p);
        double* op = out.row(p);
        for (int j = 0; j < cin; ++j) {
            const double xv = scale * ip[j];
            const double* fr = filt.data() + static_cast<std::size_t>(j) * cout;
            for (int i = 0; i < cout; ++i) op[i] += xv * fr[i];
        }
    }
}

inline Block relu(const Block& b) {
    Block out = b;
    for (double& v : out.a) v = v >= 0.0 ? v : 0.0;
    return out;
}

// d x d matrix of channel contractions G[p,p'] = <a[p,:], b[p',:]>.
inline std::vector<double> pixel_gram(const Block& a, const Block& b) {
    const int d = a.pixels;
    std::vector<double> g(static_cast<std::size_t>(d) * d, 0.0);
    for (int p = 0; p < d; ++p)
        for (int p2 = 0; p2 < d; ++p2) {
            const double* ar = a.row(p);
            const double* br = b.row(p2);
            double s = 0.0;
            for (int c = 0; c < a.channels; ++c) s += ar[c] * br[c];
            g[static_cast<std::size_t>(p) * d + p2] = s;
        }
    return g;
}

}  // namespace fwdetail

struct ForwardCache {
    double output = 0.0;
    std::vector<fwdetail::Block> f;   // levels 0..L
    std::vector<fwdetail::Block> g;   // levels 1..L (pre-activations)
    fwdetail::Block x;
};

inline ForwardCache forward(const InputSignal& xin, const NetworkParams& np,
                            const NetworkConfig& cfg) {
    cfg.validate();
    if (xin.channels != cfg.kp.channels || xin.pixels != cfg.kp.pixels)
        throw std::invalid_argument("forward: input shape does not match config");
    const int d = cfg.kp.pixels;
    const int q = cfg.kp.filter;
    const int L = cfg.kp.depth;
    const double alpha = cfg.kp.alpha;
    using fwdetail::Block;

    ForwardCache fc;
    fc.x = fwdetail::to_block(xin);
    fc.f.resize(static_cast<std::size_t>(L) + 1);
    fc.g.resize(static_cast<std::size_t>(L) + 1);  // slot 0 unused

    const double emb = 1.0 / std::sqrt(static_cast<double>(cfg.kp.channels));
    fc.f[0] = Block(d, cfg.width(1));
    fwdetail::dense_embed(np.v0, fc.x, fc.f[0], emb);

    for (int l = 1; l <= L; ++l) {
        Block g(d, cfg.width(l));
        if (l == 1) {
            fwdetail::dense_embed(np.w1, fc.x, g, emb);
        } else {
            const double sw = std::sqrt(cfg.kp.cw / (q * static_cast<double>(cfg.width(l - 1))));
            fwdetail::conv(np.w[static_cast<std::size_t>(l - 1)], q, fc.f[static_cast<std::size_t>(l - 1)], g, sw);
        }
        fc.g[static_cast<std::size_t>(l)] = std::move(g);

        Block f = cfg.kp.skip ? fc.f[static_cast<std::size_t>(l - 1)] : Block(d, cfg.width(l));
        const Block act = fwdetail::relu(fc.g[static_cast<std::size_t>(l)]);
        const double sv = alpha * std::sqrt(cfg.kp.cv / (q * static_cast<double>(cfg.width(l))));
        fwdetail::conv(np.v[static_cast<std::size_t>(l - 1)], q, act, f, sv);
        fc.f[static_cast<std::size_t>(l)] = std::move(f);
    }

    const Block& top = fc.f[static_cast<std::size_t>(L)];
    const int cl = cfg.width(L);
    double out = 0.0;
    switch (cfg.kp.head) {
        case Head::Eq:
            for (int i = 0; i < cl; ++i) out += np.head[static_cast<std::size_t>(i)] * top.row(0)[i];
            out /= std::sqrt(static_cast<double>(cl));
            break;
        case Head::Tr:
            for (int p = 0; p < d; ++p)
                for (int i = 0; i < cl; ++i)
                    out += np.head[static_cast<std::size_t>(p) * cl + i] * top.row(p)[i];
            out /= std::sqrt(static_cast<double>(d)) * std::sqrt(static_cast<double>(cl));
            break;
        case Head::GAP:
            for (int i = 0; i < cl; ++i) {
                double s = 0.0;
                for (int p = 0; p < d; ++p) s += top.row(p)[i];
                out += np.head[static_cast<std::size_t>(i)] * s;
            }
            out /= static_cast<double>(d) * std::sqrt(static_cast<double>(cl));
            break;
    }
    fc.output = out;
    return fc;
}

struct BackwardCache {
    std::vector<fwdetail::Block> delta;  // d out / d f^(l), levels 0..L
    std::vector<fwdetail::Block> dg;     // d out / d g^(l), levels 1..L
};

namespace fwdetail {

inline Block head_delta(const ForwardCache& fc, const NetworkParams& np, const NetworkConfig& cfg) {
    const int d = cfg.kp.pixels;
    const int cl = cfg.width(cfg.kp.depth);
    Block delta(d, cl);
    switch (cfg.kp.head) {
        case Head::Eq: {
            const double s = 1.0 / std::sqrt(static_cast<double>(cl));
            for (int i = 0; i < cl; ++i) delta.row(0)[i] = s * np.head[static_cast<std::size_t>(i)];
            break;
        }
        case Head::Tr: {
            const double s = 1.0 / (std::sqrt(static_cast<double>(d)) * std::sqrt(static_cast<double>(cl)));
            for (int p = 0; p < d; ++p)
                for (int i = 0; i < cl; ++i) delta.row(p)[i] = s * np.head[static_cast<std::size_t>(p) * cl + i];
            break;
        }
        case Head::GAP: {
            const double s = 1.0 / (static_cast<double>(d) * std::sqrt(static_cast<double>(cl)));
            for (int p = 0; p < d; ++p)
                for (int i = 0; i < cl; ++i) delta.row(p)[i] = s * np.head[static_cast<std::size_t>(i)];
            break;
        }
    }
    return delta;
}

}  // namespace fwdetail

inline BackwardCache backward(const ForwardCache& fc, const NetworkParams& np,
                              const NetworkConfig& cfg) {
    const int d = cfg.kp.pixels;
    const int q = cfg.kp.filter;
    const int L = cfg.kp.depth;
    using fwdetail::Block;

    BackwardCache bc;
    bc.delta.resize(static_cast<std::size_t>(L) + 1);
    bc.dg.resize(static_cast<std::size_t>(L) + 1);
    bc.delta[static_cast<std::size_t>(L)] = fwdetail::head_delta(fc, np, cfg);

    for (int l = L; l >= 1; --l) {
        const Block& delta = bc.delta[static_cast<std::size_t>(l)];
        const double sv = cfg.kp.alpha * std::sqrt(cfg.kp.cv / (q * static_cast<double>(cfg.width(l))));
        Block dsig(d, cfg.width(l));
        fwdetail::conv_transpose(np.v[static_cast<std::size_t>(l - 1)], q, delta, dsig, sv);
        // ReLU subgradient: 1 at u >= 0.
        const Block& g = fc.g[static_cast<std::size_t>(l)];
        for (std::size_t i = 0; i < dsig.a.size(); ++i)
            if (g.a[i] < 0.0) dsig.a[i] = 0.0;
        bc.dg[static_cast<std::size_t>(l)] = std::move(dsig);

        Block below(d, l >= 2 ? cfg.width(l - 1) : cfg.kp.channels);
        if (l >= 2) {
            const double sw = std::sqrt(cfg.kp.cw / (q * static_cast<double>(cfg.width(l - 1))));
            fwdetail::conv_transpose(np.w[static_cast<std::size_t>(l - 1)], q, bc.dg[static_cast<std::size_t>(l)], below, sw);
            if (cfg.kp.skip)
                for (std::size_t i = 0; i < below.a.size(); ++i) below.a[i] += delta.a[i];
            bc.delta[static_cast<std::size_t>(l - 1)] = std::move(below);
        } else {
            // Level 0 delta is only needed when the skip branch carries f^(0).
            if (cfg.kp.skip) bc.delta[0] = delta;
        }
    }
    return bc;
}

// Gradients with respect to every trainable weight (v0 is fixed).
struct Gradients {
    std::vector<double> w1;
    std::vector<std::vector<double>> w;  // l = 2..L at slot l-1
    std::vector<std::vector<double>> v;  // l = 1..L at slot l-1
    std::vector<double> head;

    double dot(const Gradients& o) const {
        double s = 0.0;
        for (std::size_t i = 0; i < w1.size(); ++i) s += w1[i] * o.w1[i];
        for (std::size_t l = 0; l < w.size(); ++l)
            for (std::size_t i = 0; i < w[l].size(); ++i) s += w[l][i] * o.w[l][i];
        for (std::size_t l = 0; l < v.size(); ++l)
            for (std::size_t i = 0; i < v[l].size(); ++i) s += v[l][i] * o.v[l][i];
        for (std::size_t i = 0; i < head.size(); ++i) s += head[i] * o.head[i];
        return s;
    }
};

inline Gradients grad_params(const InputSignal& xin, const NetworkParams& np,
                             const NetworkConfig& cfg) {
    const ForwardCache fc = forward(xin, np, cfg);
    const BackwardCache bc = backward(fc, np, cfg);
    const int d = cfg.kp.pixels;
    const int q = cfg.kp.filter;
    const int h = (q - 1) / 2;
    const int L = cfg.kp.depth;
    using fwdetail::Block;
    using fwdetail::wrap;

    Gradients gr;
    gr.w.resize(static_cast<std::size_t>(L));
    gr.v.resize(static_cast<std::size_t>(L));

    // First-layer filter, size-1 window over the raw input.
    const int c0 = cfg.kp.channels;
    const int c1 = cfg.width(1);
    gr.w1.assign(static_cast<std::size_t>(c0) * c1, 0.0);
    const double emb = 1.0 / std::sqrt(static_cast<double>(c0));
    for (int p = 0; p < d; ++p) {
        const double* xr = fc.x.row(p);
        const double* dr = bc.dg[1].row(p);
        for (int c = 0; c < c0; ++c)
            for (int i = 0; i < c1; ++i)
                gr.w1[static_cast<std::size_t>(c) * c1 + i] += emb * xr[c] * dr[i];
    }

    for (int l = 2; l <= L; ++l) {
        const int cin = cfg.width(l - 1);
        const int cout = cfg.width(l);
        const double sw = std::sqrt(cfg.kp.cw / (q * static_cast<double>(cin)));
        auto& gw = gr.w[static_cast<std::size_t>(l - 1)];
        gw.assign(static_cast<std::size_t>(q) * cin * cout, 0.0);
        const Block& fin = fc.f[static_cast<std::size_t>(l - 1)];
        const Block& dg = bc.dg[static_cast<std::size_t>(l)];
        for (int m = -h; m <= h; ++m)
            for (int p = 0; p < d; ++p) {
                const double* fr = fin.row(wrap(p + m, d));
                const double* dr = dg.row(p);
                double* slot = gw.data() + static_cast<std::size_t>(m + h) * cin * cout;
                for (int j = 0; j < cin; ++j) {
                    const double fv = sw * fr[j];
                    if (fv == 0.0) continue;
                    double* row = slot + static_cast<std::size_t>(j) * cout;
                    for (int i = 0; i < cout; ++i) row[i] += fv * dr[i];
                }
            }
    }

    for (int l = 1; l <= L; ++l) {
        const int c = cfg.width(l);
        const double sv = cfg.kp.alpha * std::sqrt(cfg.kp.cv / (q * static_cast<double>(c)));
        auto& gv = gr.v[static_cast<std::size_t>(l - 1)];
        gv.assign(static_cast<std::size_t>(q) * c * c, 0.0);
        const Block act = fwdetail::relu(fc.g[static_cast<std::size_t>(l)]);
        const Block& delta = bc.delta[static_cast<std::size_t>(l)];
        for (int m = -h; m <= h; ++m)
            for (int p = 0; p < d; ++p) {
                const double* ar = act.row(wrap(p + m, d));
                const double* dr = delta.row(p);
                double* slot = gv.data() + static_cast<std::size_t>(m + h) * c * c;
                for (int j = 0; j < c; ++j) {
                    const double av = sv * ar[j];
                    if (av == 0.0) continue;
                    double* row = slot + static_cast<std::size_t>(j) * c;
                    for (int i = 0; i < c; ++i) row[i] += av * dr[i];
                }
            }
    }

    const Block& top = fc.f[static_cast<std::size_t>(L)];
    const int cl = cfg.width(L);
    switch (cfg.kp.head) {
        case Head::Eq: {
            gr.head.assign(static_cast<std::size_t>(cl), 0.0);
            const double s = 1.0 / std::sqrt(static_cast<double>(cl));
            for (int i = 0; i < cl; ++i) gr.head[static_cast<std::size_t>(i)] = s * top.row(0)[i];
            break;
        }
        case Head::Tr: {
            gr.head.assign(static_cast<std::size_t>(d) * cl, 0.0);
            const double s = 1.0 / (std::sqrt(static_cast<double>(d)) * std::sqrt(static_cast<double>(cl)));
            for (int p = 0; p < d; ++p)
                for (int i = 0; i < cl; ++i)
                    gr.head[static_cast<std::size_t>(p) * cl + i] = s * top.row(p)[i];
            break;
        }
        case Head::GAP: {
            gr.head.assign(static_cast<std::size_t>(cl), 0.0);
            const double s = 1.0 / (static_cast<double>(d) * std::sqrt(static_cast<double>(cl)));
            for (int i = 0; i < cl; ++i) {
                double acc = 0.0;
                for (int p = 0; p < d; ++p) acc += top.row(p)[i];
                gr.head[static_cast<std::size_t>(i)] = s * acc;
            }
            break;
        }
    }
    return gr;
}

// <grad f(x), grad f(z)> over trainable weights without materializing the
// per-parameter gradients: every block reduces to d x d pixel contractions.
inline double ntk_dot_cached(const ForwardCache& fx, const BackwardCache& bx,
                             const ForwardCache& fz, const BackwardCache& bz,
                             const NetworkConfig& cfg) {
    const int d = cfg.kp.pixels;
    const int q = cfg.kp.filter;
    const int h = (q - 1) / 2;
    const int L = cfg.kp.depth;
    using fwdetail::pixel_gram;
    using fwdetail::wrap;

    auto window_dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (int m = -h; m <= h; ++m)
            for (int p = 0; p < d; ++p)
                for (int p2 = 0; p2 < d; ++p2)
                    s += a[static_cast<std::size_t>(p) * d + p2] *
                         b[static_cast<std::size_t>(wrap(p + m, d)) * d + wrap(p2 + m, d)];
        return s;
    };

    double total = 0.0;

    // Head block.
    const int cl = cfg.width(L);
    const auto& tx = fx.f[static_cast<std::size_t>(L)];
    const auto& tz = fz.f[static_cast<std::size_t>(L)];
    switch (cfg.kp.head) {
        case Head::Eq: {
            double s = 0.0;
            for (int i = 0; i < cl; ++i) s += tx.row(0)[i] * tz.row(0)[i];
            total += s / cl;
            break;
        }
        case Head::Tr: {
            double s = 0.0;
            for (std::size_t i = 0; i < tx.a.size(); ++i) s += tx.a[i] * tz.a[i];
            total += s / (static_cast<double>(d) * cl);
            break;
        }
        case Head::GAP: {
            double s = 0.0;
            for (int i = 0; i < cl; ++i) {
                double ax = 0.0, az = 0.0;
                for (int p = 0; p < d; ++p) {
                    ax += tx.row(p)[i];
                    az += tz.row(p)[i];
                }
                s += ax * az;
            }
            total += s / (static_cast<double>(d) * d * cl);
            break;
        }
    }

    // First-layer filter: size-1 window.
    {
        const auto dgx = pixel_gram(bx.dg[1], bz.dg[1]);
        const auto xz = pixel_gram(fx.x, fz.x);
        double s = 0.0;
        for (std::size_t i = 0; i < dgx.size(); ++i) s += dgx[i] * xz[i];
        total += s / cfg.kp.channels;
    }

    for (int l = 2; l <= L; ++l) {
        const auto dg = pixel_gram(bx.dg[static_cast<std::size_t>(l)], bz.dg[static_cast<std::size_t>(l)]);
        const auto ff = pixel_gram(fx.f[static_cast<std::size_t>(l - 1)], fz.f[static_cast<std::size_t>(l - 1)]);
        total += cfg.kp.cw / (q * static_cast<double>(cfg.width(l - 1))) * window_dot(dg, ff);
    }
    for (int l = 1; l <= L; ++l) {
        const auto dd = pixel_gram(bx.delta[static_cast<std::size_t>(l)], bz.delta[static_cast<std::size_t>(l)]);
        const auto ss = pixel_gram(fwdetail::relu(fx.g[static_cast<std::size_t>(l)]),
                                   fwdetail::relu(fz.g[static_cast<std::size_t>(l)]));
        total += cfg.kp.alpha * cfg.kp.alpha * cfg.kp.cv / (q * static_cast<double>(cfg.width(l))) *
                 window_dot(dd, ss);
    }
    return total;
}

inline double ntk_pair_dot(const InputSignal& x, const InputSignal& z, const NetworkParams& np,
                           const NetworkConfig& cfg) {
    const ForwardCache fx = forward(x, np, cfg);
    const ForwardCache fz = forward(z, np, cfg);
    const BackwardCache bx = backward(fx, np, cfg);
    const BackwardCache bz = backward(fz, np, cfg);
    return ntk_dot_cached(fx, bx, fz, bz, cfg);
}

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int samples = 0;
};

namespace fwdetail {

template <typename PerDraw>
MCEstimate mc_estimate(int n_samples, int threads, const PerDraw& per_draw) {
    if (n_samples < 2) throw std::invalid_argument("mc estimate: need at least 2 samples");
    std::vector<double> vals(static_cast<std::size_t>(n_samples));
    parallel_for(static_cast<std::size_t>(n_samples), threads,
                 [&](std::size_t i) { vals[i] = per_draw(static_cast<std::uint64_t>(i)); });
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= n_samples;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= (n_samples - 1);
    MCEstimate e;
    e.mean = mean;
    e.std_error = std::sqrt(var / n_samples);
    e.samples = n_samples;
    return e;
}

}  // namespace fwdetail

inline MCEstimate mc_gpk(const InputSignal& x, const InputSignal& z, const NetworkConfig& cfg,
                         int n_samples, int threads = 1) {
    return fwdetail::mc_estimate(n_samples, threads, [&](std::uint64_t i) {
        const NetworkParams np = sample_network(cfg, i);
        return forward(x, np, cfg).output * forward(z, np, cfg).output;
    });
}

inline MCEstimate mc_ntk(const InputSignal& x, const InputSignal& z, const NetworkConfig& cfg,
                         int n_samples, int threads = 1) {
    return fwdetail::mc_estimate(n_samples, threads, [&](std::uint64_t i) {
        const NetworkParams np = sample_network(cfg, i);
        return ntk_pair_dot(x, z, np, cfg);
    });
}

}  // namespace reskern
