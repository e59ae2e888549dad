#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reskern/linalg.hpp"
#include "reskern/multisphere.hpp"
#include "reskern/types.hpp"

namespace reskern {

// Symmetric matrix of normalized kernel values with a unit diagonal.
struct GramMatrix {
    SquareMatrix a;
    int size() const { return a.n; }
};

using KernelFn = std::function<double(const InputSignal&, const InputSignal&)>;

inline GramMatrix gram(const std::vector<InputSignal>& points, const KernelFn& kernel) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw std::invalid_argument("gram: need at least two points");
    for (const auto& p : points)
        if (!p.on_multisphere)
            throw std::invalid_argument("gram: normalized kernel path requires multi-sphere points");

    GramMatrix g;
    g.a = SquareMatrix(n);
    for (int i = 0; i < n; ++i) {
        g.a(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            const double v = kernel(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
            if (!std::isfinite(v))
                throw std::runtime_error("gram: non-finite kernel value for pair (" +
                                         std::to_string(i) + "," + std::to_string(j) + ")");
            g.a(i, j) = v;
            g.a(j, i) = v;
        }
    }
    return g;
}

// Unit-diagonal matrix with constant off-diagonal b. Spectrum is
// 1 - b + n b (once) and 1 - b (n-1 times).
struct DoubleConstant {
    double b = 0.0;
    int n = 0;

    double lambda_max() const { return 1.0 - b + n * b; }
    double lambda_min() const { return 1.0 - b; }
    double rho() const { return lambda_max() / lambda_min(); }
};

inline DoubleConstant double_constant_of(const GramMatrix& g) {
    const int n = g.size();
    double off = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) off += g.a(i, j);
    if (off < 0.0)
        throw std::invalid_argument("double_constant_of: negative off-diagonal sum");
    DoubleConstant dc;
    dc.n = n;
    dc.b = off / (static_cast<double>(n) * (n - 1));
    return dc;
}

struct ConditionReport {
    double rho_actual = 0.0;
    double rho_lower = 0.0;
    double rho_upper = 0.0;
    double epsilon = 0.0;
    double b = 0.0;
    bool valid_upper = false;
};

// Entrywise L1 distance between the Gram matrix and its double-constant
// approximation (the diagonal contributes nothing).
inline double l1_gap(const GramMatrix& g, const DoubleConstant& dc) {
    double s = 0.0;
    for (int i = 0; i < g.size(); ++i)
        for (int j = 0; j < g.size(); ++j)
            if (i != j) s += std::abs(g.a(i, j) - dc.b);
    return s;
}

// Condition-number bounds through the double-constant surrogate. The lower
// bound is rho of the surrogate; the upper bound perturbs its extreme
// eigenvalues by epsilon and holds only while epsilon < lambda_min. For
// uniformly sampled data the constant vector is the top eigenvector, which
// sharpens epsilon to the mean row discrepancy and removes it from the
// numerator.
inline ConditionReport condition_bounds(const GramMatrix& g, bool uniform_data) {
    const DoubleConstant dc = double_constant_of(g);
    const int n = g.size();

    ConditionReport r;
    r.b = dc.b;
    r.rho_lower = dc.rho();

    double eps = 0.0;
    if (uniform_data) {
        eps = l1_gap(g, dc) / n;
    } else {
        for (int i = 0; i < n; ++i) {
            double row = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) row += std::abs(g.a(i, j) - dc.b);
            eps = std::max(eps, row);
        }
    }
    r.epsilon = eps;

    const double lmin = dc.lambda_min();
    const double lmax = dc.lambda_max();
    if (eps < lmin) {
        r.valid_upper = true;
        r.rho_upper = uniform_data ? lmax / (lmin - eps) : (lmax + eps) / (lmin - eps);
    }

    const EigenDecomposition ed = sym_eig(g.a);
    r.rho_actual = ed.values.front() / ed.values.back();
    return r;
}

enum class TraceKernelKind { ResCGPK, CGPK };

struct DepthSweepRow {
    int depth = 0;
    TraceKernelKind kind = TraceKernelKind::ResCGPK;
    ConditionReport report;
    double l1 = 0.0;
};

// Gram matrices of the normalized trace kernels at every depth in
// [depth_min, depth_max], residual and plain, over a fixed point set. One
// recursion pass per pair serves all depths.
inline std::vector<DepthSweepRow> depth_sweep(const std::vector<InputSignal>& points,
                                              int depth_min, int depth_max,
                                              KernelParams params) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw std::invalid_argument("depth_sweep: need at least two points");
    if (depth_min < 1 || depth_max < depth_min)
        throw std::invalid_argument("depth_sweep: bad depth range");
    params.depth = depth_max;
    params.validate();
    require_normalized_regime(params, "depth_sweep");
    for (const auto& p : points)
        if (!p.on_multisphere) throw std::invalid_argument("depth_sweep: points must be multi-sphere");

    const int nd = depth_max - depth_min + 1;
    std::vector<SquareMatrix> gram_res(static_cast<std::size_t>(nd), SquareMatrix(n));
    std::vector<SquareMatrix> gram_plain(static_cast<std::size_t>(nd), SquareMatrix(n));

    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const CosineVector t = cosines(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
            const auto res_levels = rescgpk_ms_levels(t, params);
            const auto plain_levels = cgpk_ms_levels(t, params);
            for (int l = depth_min; l <= depth_max; ++l) {
                const auto& rv = res_levels[static_cast<std::size_t>(l - 1)];
                const auto& pv = plain_levels[static_cast<std::size_t>(l - 1)];
                double rs = 0.0, ps = 0.0;
                for (double v : rv) rs += v;
                for (double v : pv) ps += v;
                const int idx = l - depth_min;
                gram_res[static_cast<std::size_t>(idx)](i, j) = rs / t.dim();
                gram_res[static_cast<std::size_t>(idx)](j, i) = rs / t.dim();
                gram_plain[static_cast<std::size_t>(idx)](i, j) = ps / t.dim();
                gram_plain[static_cast<std::size_t>(idx)](j, i) = ps / t.dim();
            }
        }
    }

    std::vector<DepthSweepRow> rows;
    rows.reserve(static_cast<std::size_t>(2 * nd));
    for (int l = depth_min; l <= depth_max; ++l) {
        const int idx = l - depth_min;
        for (TraceKernelKind kind : {TraceKernelKind::ResCGPK, TraceKernelKind::CGPK}) {
            GramMatrix g;
            g.a = kind == TraceKernelKind::ResCGPK ? gram_res[static_cast<std::size_t>(idx)]
                                                   : gram_plain[static_cast<std::size_t>(idx)];
            for (int i = 0; i < n; ++i) g.a(i, i) = 1.0;
            DepthSweepRow row;
            row.depth = l;
            row.kind = kind;
            row.report = condition_bounds(g, /*uniform_data=*/true);
            row.l1 = l1_gap(g, double_constant_of(g));
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace reskern
