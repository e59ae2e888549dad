#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace reskern {

// Dense row-major square matrix, just enough for the Gram work here.
struct SquareMatrix {
    int n = 0;
    std::vector<double> a;

    SquareMatrix() = default;
    explicit SquareMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

struct EigenDecomposition {
    std::vector<double> values;  // descending
    SquareMatrix vectors;        // column j pairs with values[j]
};

inline double frobenius_norm(const SquareMatrix& m) {
    double s = 0.0;
    for (double v : m.a) s += v * v;
    return std::sqrt(s);
}

// Cyclic Jacobi eigensolver for symmetric matrices. Sweeps until the
// off-diagonal Frobenius mass drops below 1e-12 of the matrix norm, capped at
// 100 sweeps.
inline EigenDecomposition sym_eig(const SquareMatrix& m) {
    const int n = m.n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-10)
                throw std::invalid_argument("sym_eig: matrix is not symmetric");

    SquareMatrix a = m;
    SquareMatrix v(n);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;

    const double norm = std::max(frobenius_norm(a), 1e-300);
    const double tol = 1e-12 * norm;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
        if (std::sqrt(off) <= tol) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double sign = theta >= 0.0 ? 1.0 : -1.0;
                const double t = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return diag[static_cast<std::size_t>(i)] > diag[static_cast<std::size_t>(j)]; });

    EigenDecomposition out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors = SquareMatrix(n);
    for (int j = 0; j < n; ++j) {
        out.values[static_cast<std::size_t>(j)] = diag[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
        for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[static_cast<std::size_t>(j)]);
    }
    return out;
}

// Pairwise (cascade) sum; deterministic for a fixed element order.
inline double pairwise_sum(const double* data, std::size_t count) {
    if (count == 0) return 0.0;
    if (count <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += data[i];
        return s;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

// Compensated accumulator for combining partial quadrature sums.
struct KahanSum {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

}  // namespace reskern
