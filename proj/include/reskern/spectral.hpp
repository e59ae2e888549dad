#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reskern/linalg.hpp"
#include "reskern/parallel.hpp"

namespace reskern {

// Gegenbauer polynomial C_n^(alpha_g) by the three-term recurrence.
inline double gegenbauer(int n, double alpha_g, double t) {
    if (n < 0) throw std::invalid_argument("gegenbauer: n must be >= 0");
    if (!(alpha_g > 0.0)) throw std::invalid_argument("gegenbauer: alpha_g must be positive");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 2.0 * alpha_g * t;
    for (int m = 2; m <= n; ++m) {
        const double next = (2.0 * t * (m + alpha_g - 1.0) * cur - (m + 2.0 * alpha_g - 2.0) * prev) / m;
        prev = cur;
        cur = next;
    }
    return cur;
}

using FrequencyMultiIndex = std::vector<int>;

inline FrequencyMultiIndex shift_pattern(const FrequencyMultiIndex& k, int i) {
    const int d = static_cast<int>(k.size());
    FrequencyMultiIndex out(static_cast<std::size_t>(d));
    const int s = ((i % d) + d) % d;
    for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(j)] = k[static_cast<std::size_t>((j + s) % d)];
    return out;
}

// Gauss nodes/weights for the weight (1 - t^2)^((C0-3)/2) on [-1,1]; the
// Gegenbauer order is C0/2 - 1. C0 = 2 is the Chebyshev case with closed-form
// nodes, larger C0 goes through Golub-Welsch on the monic recurrence.
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;  // raw weights, summing to the weight-function mass
    double geg_order = 0.0;
    int points_per_dim = 0;
    int c0 = 0;
};

inline QuadratureGrid make_quadrature_grid(int points, int c0) {
    if (points < 2) throw std::invalid_argument("make_quadrature_grid: need >= 2 points");
    if (c0 < 2) throw std::invalid_argument("make_quadrature_grid: C0 must be >= 2");

    QuadratureGrid g;
    g.points_per_dim = points;
    g.c0 = c0;
    g.geg_order = c0 / 2.0 - 1.0;

    if (c0 == 2) {
        g.nodes.resize(static_cast<std::size_t>(points));
        g.weights.assign(static_cast<std::size_t>(points), M_PI / points);
        for (int i = 0; i < points; ++i)
            g.nodes[static_cast<std::size_t>(i)] = std::cos((2.0 * (points - i) - 1.0) * M_PI / (2.0 * points));
        return g;
    }

    const double lam = g.geg_order;  // > 0 here
    SquareMatrix j(points);
    for (int k = 1; k < points; ++k) {
        const double beta = k * (k + 2.0 * lam - 1.0) / (4.0 * (k + lam) * (k + lam - 1.0));
        j(k - 1, k) = std::sqrt(beta);
        j(k, k - 1) = j(k - 1, k);
    }
    const EigenDecomposition ed = sym_eig(j);
    const double mu0 = std::sqrt(M_PI) * std::exp(std::lgamma(lam + 0.5) - std::lgamma(lam + 1.0));

    std::vector<std::pair<double, double>> nw(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double v0 = ed.vectors(0, i);
        nw[static_cast<std::size_t>(i)] = {ed.values[static_cast<std::size_t>(i)], mu0 * v0 * v0};
    }
    std::sort(nw.begin(), nw.end());
    g.nodes.resize(static_cast<std::size_t>(points));
    g.weights.resize(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        g.nodes[static_cast<std::size_t>(i)] = nw[static_cast<std::size_t>(i)].first;
        g.weights[static_cast<std::size_t>(i)] = nw[static_cast<std::size_t>(i)].second;
    }
    return g;
}

struct EigenEstimate {
    FrequencyMultiIndex k;
    double lambda = 0.0;
    double abs_tolerance = 0.0;
};

using MultiDotKernel = std::function<double(const std::vector<double>&)>;

namespace detail {

// Orthonormal polynomial table tab[k][i] under the grid's probability
// measure; normalization constants come from the quadrature itself, so one
// code path covers every C0.
inline std::vector<std::vector<double>> orthonormal_table(const QuadratureGrid& g, int kmax) {
    const int n = g.points_per_dim;
    double mass = 0.0;
    for (double w : g.weights) mass += w;

    std::vector<std::vector<double>> tab(static_cast<std::size_t>(kmax) + 1,
                                         std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i) {
        const double t = g.nodes[static_cast<std::size_t>(i)];
        if (g.c0 == 2) {
            double prev = 1.0, cur = t;  // Chebyshev T
            tab[0][static_cast<std::size_t>(i)] = 1.0;
            if (kmax >= 1) tab[1][static_cast<std::size_t>(i)] = cur;
            for (int k = 2; k <= kmax; ++k) {
                const double next = 2.0 * t * cur - prev;
                prev = cur;
                cur = next;
                tab[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = cur;
            }
        } else {
            const double lam = g.geg_order;
            double prev = 1.0, cur = 2.0 * lam * t;
            tab[0][static_cast<std::size_t>(i)] = 1.0;
            if (kmax >= 1) tab[1][static_cast<std::size_t>(i)] = cur;
            for (int k = 2; k <= kmax; ++k) {
                const double next = (2.0 * t * (k + lam - 1.0) * cur - (k + 2.0 * lam - 2.0) * prev) / k;
                prev = cur;
                cur = next;
                tab[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = cur;
            }
        }
    }
    for (int k = 0; k <= kmax; ++k) {
        double h = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = tab[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            h += v * v * g.weights[static_cast<std::size_t>(i)];
        }
        h /= mass;
        const double inv = 1.0 / std::sqrt(h);
        for (double& v : tab[static_cast<std::size_t>(k)]) v *= inv;
    }
    return tab;
}

// One full tensor sweep: projections of the kernel onto every requested
// frequency pattern. Partial sums are per-slice and combined in slice order,
// so the result does not depend on the thread count.
inline std::vector<double> project_patterns(const MultiDotKernel& kernel,
                                            const std::vector<FrequencyMultiIndex>& patterns,
                                            const QuadratureGrid& g, int dims, int threads) {
    int kmax = 0;
    for (const auto& k : patterns)
        for (int v : k) kmax = std::max(kmax, v);
    const auto tab = orthonormal_table(g, kmax);
    const int n = g.points_per_dim;
    double mass = 0.0;
    for (double w : g.weights) mass += w;
    std::vector<double> pw(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pw[static_cast<std::size_t>(i)] = g.weights[static_cast<std::size_t>(i)] / mass;

    const std::size_t np = patterns.size();
    std::vector<std::vector<double>> slice_sums(static_cast<std::size_t>(n),
                                                std::vector<double>(np, 0.0));

    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i0) {
        std::vector<int> idx(static_cast<std::size_t>(dims), 0);
        idx[0] = static_cast<int>(i0);
        std::vector<double> t(static_cast<std::size_t>(dims));
        std::vector<KahanSum> acc(np);
        const std::size_t inner = static_cast<std::size_t>(std::pow(static_cast<double>(n), dims - 1) + 0.5);
        for (std::size_t step = 0; step < inner; ++step) {
            double wprod = 1.0;
            for (int j = 0; j < dims; ++j) {
                t[static_cast<std::size_t>(j)] = g.nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
                wprod *= pw[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
            }
            const double kv = kernel(t) * wprod;
            for (std::size_t p = 0; p < np; ++p) {
                double prod = kv;
                for (int j = 0; j < dims; ++j)
                    prod *= tab[static_cast<std::size_t>(patterns[p][static_cast<std::size_t>(j)])]
                               [static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
                acc[p].add(prod);
            }
            for (int j = dims - 1; j >= 1; --j) {
                if (++idx[static_cast<std::size_t>(j)] < n) break;
                idx[static_cast<std::size_t>(j)] = 0;
            }
        }
        for (std::size_t p = 0; p < np; ++p) slice_sums[i0][p] = acc[p].value();
    });

    std::vector<KahanSum> total(np);
    for (int i = 0; i < n; ++i)
        for (std::size_t p = 0; p < np; ++p) total[p].add(slice_sums[static_cast<std::size_t>(i)][p]);
    std::vector<double> out(np);
    for (std::size_t p = 0; p < np; ++p) out[p] = total[p].value();
    return out;
}

}  // namespace detail

// Eigenvalue estimates for a batch of frequency patterns sharing one kernel
// sweep. The tolerance proxy is the change against a half-resolution grid.
inline std::vector<EigenEstimate> eigenvalues_batch(const MultiDotKernel& kernel,
                                                    const std::vector<FrequencyMultiIndex>& patterns,
                                                    const QuadratureGrid& grid, int threads = 1) {
    if (patterns.empty()) return {};
    const int dims = static_cast<int>(patterns.front().size());
    int kmax = 0;
    for (const auto& k : patterns) {
        if (static_cast<int>(k.size()) != dims)
            throw std::invalid_argument("eigenvalues_batch: patterns must share dimension");
        for (int v : k) {
            if (v < 0) throw std::invalid_argument("eigenvalues_batch: negative frequency");
            kmax = std::max(kmax, v);
        }
    }
    if (grid.points_per_dim < kmax + 1)
        throw std::invalid_argument("eigenvalues_batch: grid too coarse for max frequency " +
                                    std::to_string(kmax));

    const auto fine = detail::project_patterns(kernel, patterns, grid, dims, threads);
    const int coarse_pts = std::max(kmax + 1, grid.points_per_dim / 2);
    const QuadratureGrid coarse = make_quadrature_grid(coarse_pts, grid.c0);
    const auto rough = detail::project_patterns(kernel, patterns, coarse, dims, threads);

    std::vector<EigenEstimate> out(patterns.size());
    for (std::size_t p = 0; p < patterns.size(); ++p) {
        out[p].k = patterns[p];
        out[p].lambda = fine[p];
        out[p].abs_tolerance = std::max(std::abs(fine[p] - rough[p]), 1e-14);
    }
    return out;
}

inline EigenEstimate eigenvalue_estimate(const MultiDotKernel& kernel, const FrequencyMultiIndex& k,
                                         int c0, const QuadratureGrid& grid, int threads = 1) {
    if (grid.c0 != c0)
        throw std::invalid_argument("eigenvalue_estimate: grid was built for a different C0");
    return eigenvalues_batch(kernel, {k}, grid, threads).front();
}

struct SlopeFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// OLS of log(lambda) against log(k).
inline SlopeFit decay_slope(const std::vector<std::pair<int, double>>& pairs) {
    if (pairs.size() < 3) throw std::invalid_argument("decay_slope: need at least 3 points");
    const std::size_t n = pairs.size();
    double sx = 0.0, sy = 0.0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (pairs[i].first <= 0 || !(pairs[i].second > 0.0))
            throw std::invalid_argument("decay_slope: k and lambda must be positive");
        xs[i] = std::log(static_cast<double>(pairs[i].first));
        ys[i] = std::log(pairs[i].second);
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("decay_slope: degenerate abscissa");
    SlopeFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    if (syy == 0.0) {
        fit.r_squared = 1.0;
    } else {
        double ssres = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ys[i] - (fit.intercept + fit.exponent * xs[i]);
            ssres += r * r;
        }
        fit.r_squared = 1.0 - ssres / syy;
    }
    return fit;
}

enum class SpectralKind { GPK, NTK };

// Checks a fitted per-pattern exponent against the theoretical decay window
// [-m (C0+2), -m (C0 + 2 nu_b - 3)], widened by `slack` per active pixel.
inline bool theorem_sandwich_check(double exponent, int c0, SpectralKind kind, int m, int d = 4,
                                   double slack = 0.5) {
    if (m < 1) throw std::invalid_argument("theorem_sandwich_check: m must be >= 1");
    const double nu_b = kind == SpectralKind::GPK ? 1.0 + 3.0 / (2.0 * d) : 1.0 + 1.0 / (2.0 * d);
    const double lo = -m * (c0 + 2.0) - slack * m;
    const double hi = -m * (c0 + 2.0 * nu_b - 3.0) + slack * m;
    return exponent >= lo && exponent <= hi;
}

}  // namespace reskern
