#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "reskern/arc_cosine.hpp"
#include "reskern/types.hpp"

namespace reskern {

namespace detail {

// Window sum v[j-h..j+h] (circular), h = (q-1)/2.
inline double window_sum(const std::vector<double>& v, int j, int q) {
    const int d = static_cast<int>(v.size());
    const int h = (q - 1) / 2;
    double s = 0.0;
    for (int k = -h; k <= h; ++k) s += v[static_cast<std::size_t>(((j + k) % d + d) % d)];
    return s;
}

// Double-window sum over k,k' in [-h,h] of f(v[j+k+k']); offset m=k+k' occurs
// q-|m| times, so the q^2 terms collapse to 2q-1 evaluations.
inline double double_window_kappa1(const std::vector<double>& v, int j, int q) {
    const int d = static_cast<int>(v.size());
    double s = 0.0;
    for (int m = -(q - 1); m <= q - 1; ++m) {
        const double c = static_cast<double>(q - std::abs(m));
        s += c * kappa1(v[static_cast<std::size_t>(((j + m) % d + d) % d)]);
    }
    return s;
}

}  // namespace detail

inline void require_normalized_regime(const KernelParams& p, const char* who) {
    if (p.cv != 2.0 || p.cw != 1.0)
        throw std::invalid_argument(std::string(who) +
                                    ": normalized recursion requires cv=2, cw=1");
}

// Normalized equivariant ResCGPK evaluated at every cyclic shift of t at once.
// Entry j of level l holds the depth-l kernel at shift j, so the full table
// costs O(L d q) kappa1 calls instead of the exponential naive recursion.
// Each level applies kappa1 to the window-averaged covariance per pixel and
// then window-sums the results, matching the exact expectation recursion (and
// the general-input path) rather than pushing kappa1 through the average.
// levels[l-1][j] for l = 1..L.
inline std::vector<std::vector<double>> rescgpk_ms_levels(const CosineVector& t,
                                                          const KernelParams& params) {
    params.validate();
    require_normalized_regime(params, "rescgpk_ms_levels");
    const int d = t.dim();
    if (d != params.pixels) throw std::invalid_argument("rescgpk_ms_levels: t length != pixels");
    const int q = params.filter;
    const int h = (q - 1) / 2;
    const double a2 = params.alpha * params.alpha;
    const double norm = 1.0 + a2;

    std::vector<std::vector<double>> levels;
    levels.reserve(static_cast<std::size_t>(params.depth));

    std::vector<double> cur = t.t;  // K-bar at the previous level, all shifts
    std::vector<double> cov(static_cast<std::size_t>(d));
    std::vector<double> k1(static_cast<std::size_t>(d));
    for (int l = 1; l <= params.depth; ++l) {
        // Normalized pre-activation covariance: the raw cosines at the first
        // level, a window average of the previous kernel afterwards.
        if (l == 1) {
            cov = cur;
        } else {
            for (int j = 0; j < d; ++j)
                cov[static_cast<std::size_t>(j)] = detail::window_sum(cur, j, q) / q;
        }
        for (int j = 0; j < d; ++j) k1[static_cast<std::size_t>(j)] = kappa1(cov[static_cast<std::size_t>(j)]);
        std::vector<double> next(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j)
            next[static_cast<std::size_t>(j)] =
                (cur[static_cast<std::size_t>(j)] + a2 / q * detail::window_sum(k1, j, q)) / norm;
        cur.swap(next);
        levels.push_back(cur);
    }
    return levels;
}

// Normalized equivariant ResCGPK at t; exactly 1 at t = (1,...,1).
inline double rescgpk_multisphere_normalized(const CosineVector& t, const KernelParams& params) {
    return rescgpk_ms_levels(t, params).back()[0];
}

// Normalized trace kernel: mean of the equivariant kernel over all shifts.
inline double rescgpk_multisphere_normalized_tr(const CosineVector& t,
                                                const KernelParams& params) {
    const std::vector<double> v = rescgpk_ms_levels(t, params).back();
    double s = 0.0;
    for (double u : v) s += u;
    return s / static_cast<double>(v.size());
}

// Plain (no skip) normalized CGPK, all shifts per level. The recursion is
// self-normalized: alpha cancels once the kernel is divided by its value at
// t = (1,...,1), so none appears here.
// Conventions: levels[0] is the depth-1 kernel.
inline std::vector<std::vector<double>> cgpk_ms_levels(const CosineVector& t,
                                                       const KernelParams& params) {
    params.validate();
    require_normalized_regime(params, "cgpk_ms_levels");
    const int d = t.dim();
    if (d != params.pixels) throw std::invalid_argument("cgpk_ms_levels: t length != pixels");
    const int q = params.filter;
    const int h = (q - 1) / 2;

    std::vector<std::vector<double>> levels;
    levels.reserve(static_cast<std::size_t>(params.depth));

    // m[j] tracks the normalized pre-activation covariance diagonal.
    std::vector<double> m = t.t;
    auto readout = [&](const std::vector<double>& v) {
        std::vector<double> out(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = -h; k <= h; ++k) s += kappa1(v[static_cast<std::size_t>(((j + k) % d + d) % d)]);
            out[static_cast<std::size_t>(j)] = s / q;
        }
        return out;
    };
    levels.push_back(readout(m));
    for (int l = 2; l <= params.depth; ++l) {
        std::vector<double> next(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j)
            next[static_cast<std::size_t>(j)] =
                detail::double_window_kappa1(m, j, q) / (static_cast<double>(q) * q);
        m.swap(next);
        levels.push_back(readout(m));
    }
    return levels;
}

inline double cgpk_multisphere_normalized(const CosineVector& t, const KernelParams& params) {
    return cgpk_ms_levels(t, params).back()[0];
}

inline double cgpk_multisphere_normalized_tr(const CosineVector& t, const KernelParams& params) {
    const std::vector<double> v = cgpk_ms_levels(t, params).back();
    double s = 0.0;
    for (double u : v) s += u;
    return s / static_cast<double>(v.size());
}

// One-convolution-per-layer kernel with a two-pixel window. Each layer maps
//   v_i -> (beta v_i + kappa1((v_i + v_{i+1})/2)) / (1 + beta)
// circularly; depth L composes L such maps and reads pixel 1. beta = 0 is the
// plain CGPK comparison, beta = 1 the residual variant.
inline std::vector<double> cgpk_appendix_h_shifts(const CosineVector& t, int depth, double beta) {
    if (beta != 0.0 && beta != 1.0)
        throw std::invalid_argument("cgpk_appendix_h: beta must be 0 or 1");
    if (depth < 1) throw std::invalid_argument("cgpk_appendix_h: depth must be >= 1");
    const int d = t.dim();
    if (d < 2) throw std::invalid_argument("cgpk_appendix_h: need at least two pixels");
    std::vector<double> v = t.t;
    std::vector<double> next(static_cast<std::size_t>(d));
    for (int l = 0; l < depth; ++l) {
        for (int i = 0; i < d; ++i) {
            const double avg = 0.5 * (v[static_cast<std::size_t>(i)] +
                                      v[static_cast<std::size_t>((i + 1) % d)]);
            next[static_cast<std::size_t>(i)] =
                (beta * v[static_cast<std::size_t>(i)] + kappa1(avg)) / (1.0 + beta);
        }
        v.swap(next);
    }
    return v;
}

inline double cgpk_appendix_h(const CosineVector& t, const KernelParams& params, double beta) {
    if (params.filter != 2)
        throw std::invalid_argument("cgpk_appendix_h: defined for filter size 2 only");
    return cgpk_appendix_h_shifts(t, params.depth, beta)[0];
}

// Fully connected residual GPK, normalized. Depth 0 is the identity u.
inline double fc_res_gpk(double u, int depth, double alpha) {
    u = clamp_unit(u, "fc_res_gpk");
    const double a2 = alpha * alpha;
    double k = u;
    for (int l = 1; l <= depth; ++l) k = (k + a2 * kappa1(k)) / (1.0 + a2);
    return k;
}

// Fully connected residual NTK (last layer excluded), normalized so that the
// value at u = 1 is exactly 1.
inline double fc_res_ntk(double u, int depth, double alpha) {
    u = clamp_unit(u, "fc_res_ntk");
    if (depth < 1) throw std::invalid_argument("fc_res_ntk: depth must be >= 1");
    const double a2 = alpha * alpha;

    std::vector<double> kfc(static_cast<std::size_t>(depth) + 1);
    kfc[0] = u;
    for (int l = 1; l <= depth; ++l) kfc[static_cast<std::size_t>(l)] =
        (kfc[static_cast<std::size_t>(l - 1)] + a2 * kappa1(kfc[static_cast<std::size_t>(l - 1)])) / (1.0 + a2);

    // ptilde[l] aggregates the backward weights below layer l.
    std::vector<double> ptilde(static_cast<std::size_t>(depth) + 1, 1.0);
    for (int l = depth - 1; l >= 1; --l)
        ptilde[static_cast<std::size_t>(l)] =
            ptilde[static_cast<std::size_t>(l + 1)] * (1.0 + a2 * kappa0(kfc[static_cast<std::size_t>(l)]));

    double sum = 0.0;
    double v = 1.0;  // (1+alpha^2)^(l-1)
    for (int l = 1; l <= depth; ++l) {
        const double k = kfc[static_cast<std::size_t>(l - 1)];
        sum += v * ptilde[static_cast<std::size_t>(l)] * (kappa1(k) + k * kappa0(k));
        v *= 1.0 + a2;
    }
    const double v_top = v / (1.0 + a2);  // (1+alpha^2)^(L-1)
    return sum / (2.0 * depth * v_top);
}

// Mean over pixels of the i-fold entrywise kappa1 composition; the comparison
// envelope in the residual-vs-plain trace-kernel gap bound.
inline double kappa1_composed_mean(const CosineVector& t, int iterations) {
    double s = 0.0;
    for (double u : t.t) {
        double v = u;
        for (int i = 0; i < iterations; ++i) v = kappa1(v);
        s += v;
    }
    return s / static_cast<double>(t.dim());
}

}  // namespace reskern
