#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "reskern/arc_cosine.hpp"
#include "reskern/types.hpp"

namespace reskern {

// Recursion state for one input pair at one depth: d x d matrices of
// pre-activation covariances and the derived arc-cosine moment matrices.
struct LayerState {
    int pixels = 0;
    int level = 0;
    std::vector<double> sigma;  // Sigma^(l), row-major d x d
    std::vector<double> kmat;   // K^(l)
    std::vector<double> kdot;   // Kdot^(l)

    double sig(int i, int j) const { return sigma[static_cast<std::size_t>(i) * pixels + j]; }
    double k(int i, int j) const { return kmat[static_cast<std::size_t>(i) * pixels + j]; }
    double kd(int i, int j) const { return kdot[static_cast<std::size_t>(i) * pixels + j]; }
};

namespace detail {

inline int wrap(int i, int d) { return ((i % d) + d) % d; }

// Per-level vectors for one "diagonal family": entry p tracks pixel pair
// (p, p+offset) of the full d x d recursion. All kernel heads are assembled
// from these families.
struct FamilyStates {
    std::vector<std::vector<double>> sigma;  // [level][pixel]
    std::vector<std::vector<double>> kmat;
    std::vector<std::vector<double>> kdot;
};

// Self-pair covariance diagonals Sigma^(l)_{pp}(x,x), levels 1..L. The self
// moment matrices reduce to scalars (kappa at 1), so the recursion is linear.
inline std::vector<std::vector<double>> self_variances(const InputSignal& x,
                                                       const KernelParams& kp) {
    const int d = kp.pixels;
    const int q = kp.filter;
    const int h = (q - 1) / 2;
    const double a2 = kp.alpha * kp.alpha;
    const double khalf = kp.cv * kp.cw / 2.0;

    std::vector<std::vector<double>> s(static_cast<std::size_t>(kp.depth));
    std::vector<double> cur(static_cast<std::size_t>(d));
    for (int p = 0; p < d; ++p) cur[static_cast<std::size_t>(p)] = x.pixel_norm2(p) / kp.channels;
    s[0] = cur;

    for (int l = 2; l <= kp.depth; ++l) {
        std::vector<double> next(static_cast<std::size_t>(d), 0.0);
        for (int p = 0; p < d; ++p) {
            double conv = 0.0;
            for (int m = -(q - 1); m <= q - 1; ++m)
                conv += (q - std::abs(m)) * cur[static_cast<std::size_t>(wrap(p + m, d))];
            conv *= a2 * khalf / (static_cast<double>(q) * q);
            double base = 0.0;
            if (kp.skip) {
                if (l == 2) {
                    for (int k = -h; k <= h; ++k)
                        base += cur[static_cast<std::size_t>(wrap(p + k, d))];
                    base *= kp.cw / q;
                } else {
                    base = cur[static_cast<std::size_t>(p)];
                }
            }
            next[static_cast<std::size_t>(p)] = base + conv;
        }
        cur.swap(next);
        s[static_cast<std::size_t>(l - 1)] = cur;
    }
    return s;
}

// Family recursion for the pair (x, z) at a fixed pixel offset. sxx/szz are
// the self variances of x and z.
inline FamilyStates family_states(const InputSignal& x, const InputSignal& z, int offset,
                                  const KernelParams& kp,
                                  const std::vector<std::vector<double>>& sxx,
                                  const std::vector<std::vector<double>>& szz) {
    const int d = kp.pixels;
    const int q = kp.filter;
    const int h = (q - 1) / 2;
    const double a2 = kp.alpha * kp.alpha;
    const double khalf = kp.cv * kp.cw / 2.0;

    FamilyStates fs;
    fs.sigma.resize(static_cast<std::size_t>(kp.depth));
    fs.kmat.resize(static_cast<std::size_t>(kp.depth));
    fs.kdot.resize(static_cast<std::size_t>(kp.depth));

    std::vector<double> sig(static_cast<std::size_t>(d));
    for (int p = 0; p < d; ++p)
        sig[static_cast<std::size_t>(p)] = x.pixel_dot(z, p, wrap(p + offset, d)) / kp.channels;

    for (int l = 1; l <= kp.depth; ++l) {
        if (l > 1) {
            const std::vector<double>& kprev = fs.kmat[static_cast<std::size_t>(l - 2)];
            const std::vector<double>& sprev = fs.sigma[static_cast<std::size_t>(l - 2)];
            std::vector<double> next(static_cast<std::size_t>(d), 0.0);
            for (int p = 0; p < d; ++p) {
                double conv = 0.0;
                for (int m = -(q - 1); m <= q - 1; ++m)
                    conv += (q - std::abs(m)) * kprev[static_cast<std::size_t>(wrap(p + m, d))];
                conv *= a2 / (static_cast<double>(q) * q);
                double base = 0.0;
                if (kp.skip) {
                    if (l == 2) {
                        for (int k = -h; k <= h; ++k)
                            base += sprev[static_cast<std::size_t>(wrap(p + k, d))];
                        base *= kp.cw / q;
                    } else {
                        base = sprev[static_cast<std::size_t>(p)];
                    }
                }
                next[static_cast<std::size_t>(p)] = base + conv;
            }
            sig.swap(next);
        }
        fs.sigma[static_cast<std::size_t>(l - 1)] = sig;

        std::vector<double> km(static_cast<std::size_t>(d)), kd(static_cast<std::size_t>(d));
        const std::vector<double>& vx = sxx[static_cast<std::size_t>(l - 1)];
        const std::vector<double>& vz = szz[static_cast<std::size_t>(l - 1)];
        for (int p = 0; p < d; ++p) {
            const double den2 = vx[static_cast<std::size_t>(p)] *
                                vz[static_cast<std::size_t>(wrap(p + offset, d))];
            if (den2 <= 0.0) {
                // Degenerate pixel (zero signal): the moment vanishes.
                km[static_cast<std::size_t>(p)] = 0.0;
                kd[static_cast<std::size_t>(p)] = khalf * kappa0(0.0);
                continue;
            }
            const double den = std::sqrt(den2);
            const double rho = clamp_unit(sig[static_cast<std::size_t>(p)] / den, "family_states");
            km[static_cast<std::size_t>(p)] = khalf * den * kappa1(rho);
            kd[static_cast<std::size_t>(p)] = khalf * kappa0(rho);
        }
        fs.kmat[static_cast<std::size_t>(l - 1)] = std::move(km);
        fs.kdot[static_cast<std::size_t>(l - 1)] = std::move(kd);
    }
    return fs;
}

inline void check_pair(const InputSignal& x, const InputSignal& z, const KernelParams& kp) {
    kp.validate();
    if (x.channels != kp.channels || z.channels != kp.channels)
        throw std::invalid_argument("kernel: input channels do not match params");
    if (x.pixels != kp.pixels || z.pixels != kp.pixels)
        throw std::invalid_argument("kernel: input pixels do not match params");
}

// Equivariant readout with the readout pixel moved to r, one family.
// For skip networks the head accumulates every level's window trace on top of
// the first-level covariance; without skips only the top level contributes.
inline double eq_readout(const FamilyStates& fs, int r, const KernelParams& kp) {
    const int d = kp.pixels;
    const int q = kp.filter;
    const int h = (q - 1) / 2;
    const double a2 = kp.alpha * kp.alpha;
    double acc = 0.0;
    if (kp.skip) {
        acc = fs.sigma[0][static_cast<std::size_t>(r)];
        for (int l = 1; l <= kp.depth; ++l) {
            const std::vector<double>& km = fs.kmat[static_cast<std::size_t>(l - 1)];
            double tr = 0.0;
            for (int k = -h; k <= h; ++k) tr += km[static_cast<std::size_t>(wrap(r + k, d))];
            acc += a2 / (q * kp.cw) * tr;
        }
    } else {
        const std::vector<double>& km = fs.kmat[static_cast<std::size_t>(kp.depth - 1)];
        double tr = 0.0;
        for (int k = -h; k <= h; ++k) tr += km[static_cast<std::size_t>(wrap(r + k, d))];
        acc = a2 / (q * kp.cw) * tr;
    }
    return acc;
}

// Backward weights P^(l)_p for one family, levels 1..L (index l-1). The top
// boundary is a delta at the readout pixel; readouts at other pixels use the
// correspondingly shifted boundary, and summing those deltas over all
// readouts is the same as starting from a uniform boundary (the recursion is
// linear in P).
inline std::vector<std::vector<double>> p_weights(const FamilyStates& fs, const KernelParams& kp,
                                                  bool uniform_boundary = false) {
    const int d = kp.pixels;
    const int q = kp.filter;
    const int h = (q - 1) / 2;
    const double a2 = kp.alpha * kp.alpha;

    std::vector<std::vector<double>> pw(static_cast<std::size_t>(kp.depth));
    std::vector<double> cur(static_cast<std::size_t>(d), uniform_boundary ? 1.0 / kp.cw : 0.0);
    if (!uniform_boundary) cur[0] = 1.0 / kp.cw;
    pw[static_cast<std::size_t>(kp.depth - 1)] = cur;

    for (int l = kp.depth - 1; l >= 1; --l) {
        const std::vector<double>& kd = fs.kdot[static_cast<std::size_t>(l)];  // level l+1
        std::vector<double> next(static_cast<std::size_t>(d), 0.0);
        for (int p = 0; p < d; ++p) {
            double conv = 0.0;
            for (int k = -h; k <= h; ++k) {
                double inner = 0.0;
                for (int k2 = -h; k2 <= h; ++k2)
                    inner += cur[static_cast<std::size_t>(wrap(p + k + k2, d))];
                conv += kd[static_cast<std::size_t>(wrap(p + k, d))] * inner;
            }
            conv *= a2 / (static_cast<double>(q) * q);
            next[static_cast<std::size_t>(p)] = (kp.skip ? cur[static_cast<std::size_t>(p)] : 0.0) + conv;
        }
        cur.swap(next);
        pw[static_cast<std::size_t>(l - 1)] = cur;
    }
    return pw;
}

// Tangent-kernel correction for one family: the sum over layers and pixel
// positions of P-weighted window traces of (Kdot o Sigma + K).
inline double ntk_correction(const FamilyStates& fs, const std::vector<std::vector<double>>& pw,
                             const KernelParams& kp) {
    const int d = kp.pixels;
    const int q = kp.filter;
    const int h = (q - 1) / 2;
    const double a2 = kp.alpha * kp.alpha;
    double acc = 0.0;
    for (int l = 1; l <= kp.depth; ++l) {
        const std::vector<double>& km = fs.kmat[static_cast<std::size_t>(l - 1)];
        const std::vector<double>& kd = fs.kdot[static_cast<std::size_t>(l - 1)];
        const std::vector<double>& sg = fs.sigma[static_cast<std::size_t>(l - 1)];
        const std::vector<double>& p = pw[static_cast<std::size_t>(l - 1)];
        for (int r = 0; r < d; ++r) {
            double tr = 0.0;
            for (int k = -h; k <= h; ++k) {
                const std::size_t i = static_cast<std::size_t>(wrap(r + k, d));
                tr += kd[i] * sg[i] + km[i];
            }
            acc += p[static_cast<std::size_t>(r)] * tr;
        }
    }
    return a2 / q * acc;
}

}  // namespace detail

// Full recursion states for the pair (x, z), one LayerState per level.
inline std::vector<LayerState> rescgpk_layers(const InputSignal& x, const InputSignal& z,
                                              const KernelParams& params) {
    detail::check_pair(x, z, params);
    const int d = params.pixels;
    const auto sxx = detail::self_variances(x, params);
    const auto szz = detail::self_variances(z, params);

    std::vector<LayerState> out(static_cast<std::size_t>(params.depth));
    for (int l = 0; l < params.depth; ++l) {
        out[static_cast<std::size_t>(l)].pixels = d;
        out[static_cast<std::size_t>(l)].level = l + 1;
        out[static_cast<std::size_t>(l)].sigma.assign(static_cast<std::size_t>(d) * d, 0.0);
        out[static_cast<std::size_t>(l)].kmat.assign(static_cast<std::size_t>(d) * d, 0.0);
        out[static_cast<std::size_t>(l)].kdot.assign(static_cast<std::size_t>(d) * d, 0.0);
    }
    for (int o = 0; o < d; ++o) {
        const auto fs = detail::family_states(x, z, o, params, sxx, szz);
        for (int l = 0; l < params.depth; ++l)
            for (int p = 0; p < d; ++p) {
                const int j = detail::wrap(p + o, d);
                out[static_cast<std::size_t>(l)].sigma[static_cast<std::size_t>(p) * d + j] =
                    fs.sigma[static_cast<std::size_t>(l)][static_cast<std::size_t>(p)];
                out[static_cast<std::size_t>(l)].kmat[static_cast<std::size_t>(p) * d + j] =
                    fs.kmat[static_cast<std::size_t>(l)][static_cast<std::size_t>(p)];
                out[static_cast<std::size_t>(l)].kdot[static_cast<std::size_t>(p) * d + j] =
                    fs.kdot[static_cast<std::size_t>(l)][static_cast<std::size_t>(p)];
            }
    }
    return out;
}

// GPK of the convolutional ResNet (or plain CNN when skip=false), any inputs.
inline double rescgpk(const InputSignal& x, const InputSignal& z, const KernelParams& params) {
    detail::check_pair(x, z, params);
    const int d = params.pixels;
    const auto sxx = detail::self_variances(x, params);
    const auto szz = detail::self_variances(z, params);

    if (params.head == Head::Eq || params.head == Head::Tr) {
        const auto fs = detail::family_states(x, z, 0, params, sxx, szz);
        if (params.head == Head::Eq) return detail::eq_readout(fs, 0, params);
        double s = 0.0;
        for (int r = 0; r < d; ++r) s += detail::eq_readout(fs, r, params);
        return s / d;
    }
    double s = 0.0;
    for (int o = 0; o < d; ++o) {
        const auto fs = detail::family_states(x, z, o, params, sxx, szz);
        for (int r = 0; r < d; ++r) s += detail::eq_readout(fs, r, params);
    }
    return s / (static_cast<double>(d) * d);
}

// NTK of the same network. All trainable weights contribute; the fixed input
// embedding does not.
inline double rescntk(const InputSignal& x, const InputSignal& z, const KernelParams& params) {
    detail::check_pair(x, z, params);
    const int d = params.pixels;
    const auto sxx = detail::self_variances(x, params);
    const auto szz = detail::self_variances(z, params);

    if (params.head == Head::Eq) {
        const auto fs = detail::family_states(x, z, 0, params, sxx, szz);
        const auto pw = detail::p_weights(fs, params);
        return detail::eq_readout(fs, 0, params) + detail::ntk_correction(fs, pw, params);
    }
    if (params.head == Head::Tr) {
        const auto fs = detail::family_states(x, z, 0, params, sxx, szz);
        const auto pw = detail::p_weights(fs, params, /*uniform_boundary=*/true);
        double s = 0.0;
        for (int r = 0; r < d; ++r) s += detail::eq_readout(fs, r, params);
        return (s + detail::ntk_correction(fs, pw, params)) / d;
    }
    double s = 0.0;
    for (int o = 0; o < d; ++o) {
        const auto fs = detail::family_states(x, z, o, params, sxx, szz);
        const auto pw = detail::p_weights(fs, params, /*uniform_boundary=*/true);
        for (int r = 0; r < d; ++r) s += detail::eq_readout(fs, r, params);
        s += detail::ntk_correction(fs, pw, params);
    }
    return s / (static_cast<double>(d) * d);
}

// Backward weight vectors P^(l) for the unshifted pair, exposed for tests.
inline std::vector<std::vector<double>> rescntk_p_weights(const InputSignal& x,
                                                          const InputSignal& z,
                                                          const KernelParams& params) {
    detail::check_pair(x, z, params);
    const auto sxx = detail::self_variances(x, params);
    const auto szz = detail::self_variances(z, params);
    const auto fs = detail::family_states(x, z, 0, params, sxx, szz);
    return detail::p_weights(fs, params);
}

// Multi-dot-product evaluation helpers: realize t as a multi-sphere pair.
inline double rescgpk_t(const CosineVector& t, const KernelParams& params) {
    auto [x, z] = realize_pair(t, params.channels);
    return rescgpk(x, z, params);
}

inline double rescntk_t(const CosineVector& t, const KernelParams& params) {
    auto [x, z] = realize_pair(t, params.channels);
    return rescntk(x, z, params);
}

}  // namespace reskern
