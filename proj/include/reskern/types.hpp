#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "reskern/arc_cosine.hpp"

namespace reskern {

enum class Head { Eq, Tr, GAP };

inline const char* head_name(Head h) {
    switch (h) {
        case Head::Eq: return "eq";
        case Head::Tr: return "tr";
        case Head::GAP: return "gap";
    }
    return "?";
}

// Architecture hyper-parameters shared by every kernel in the family.
// skip=false drops the identity branch, giving the plain CGPK/CNTK.
struct KernelParams {
    int depth = 1;        // hidden layers L
    int filter = 3;       // filter size q, odd
    int pixels = 4;       // signal length d
    int channels = 3;     // input channels C0
    double alpha = 1.0;   // residual-branch balance
    double cv = 2.0;
    double cw = 1.0;
    Head head = Head::Eq;
    bool skip = true;

    void validate() const {
        if (depth < 1) throw std::invalid_argument("KernelParams: depth must be >= 1");
        if (pixels < 1) throw std::invalid_argument("KernelParams: pixels must be >= 1");
        if (filter < 1 || filter % 2 == 0)
            throw std::invalid_argument("KernelParams: filter must be odd and positive");
        if (filter > pixels)
            throw std::invalid_argument("KernelParams: filter must not exceed pixels");
        if (channels < 2) throw std::invalid_argument("KernelParams: channels must be >= 2");
        if (alpha < 0.0) throw std::invalid_argument("KernelParams: alpha must be >= 0");
        if (cv <= 0.0 || cw <= 0.0)
            throw std::invalid_argument("KernelParams: cv and cw must be positive");
    }
};

// Per-pixel inner products between two multi-sphere signals; the argument of
// every multi-dot-product kernel. Entries live in [-1,1].
struct CosineVector {
    std::vector<double> t;

    CosineVector() = default;
    explicit CosineVector(std::vector<double> values) : t(std::move(values)) {
        for (double& u : t) u = clamp_unit(u, "CosineVector");
    }

    int dim() const { return static_cast<int>(t.size()); }
    double operator[](int i) const { return t[static_cast<std::size_t>(i)]; }
};

// Cyclic left shift by i (any integer, reduced mod d).
inline CosineVector shift(const CosineVector& v, int i) {
    const int d = v.dim();
    CosineVector out;
    out.t.resize(static_cast<std::size_t>(d));
    const int s = ((i % d) + d) % d;
    for (int j = 0; j < d; ++j) out.t[static_cast<std::size_t>(j)] = v.t[static_cast<std::size_t>((j + s) % d)];
    return out;
}

// C0 x d multi-channel 1-D signal, column-major over pixels.
struct InputSignal {
    int channels = 0;
    int pixels = 0;
    std::vector<double> x;  // channels*pixels, x[c*pixels + p]
    bool on_multisphere = false;

    InputSignal() = default;
    InputSignal(int c0, int d) : channels(c0), pixels(d), x(static_cast<std::size_t>(c0) * d, 0.0) {}

    double& at(int c, int p) { return x[static_cast<std::size_t>(c) * pixels + p]; }
    double at(int c, int p) const { return x[static_cast<std::size_t>(c) * pixels + p]; }

    double pixel_dot(const InputSignal& other, int p, int p2) const {
        double s = 0.0;
        for (int c = 0; c < channels; ++c) s += at(c, p) * other.at(c, p2);
        return s;
    }

    double pixel_norm2(int p) const { return pixel_dot(*this, p, p); }

    // Flags the signal as multi-sphere after checking unit pixel columns.
    void mark_multisphere() {
        for (int p = 0; p < pixels; ++p) {
            if (std::abs(pixel_norm2(p) - 1.0) > 1e-10)
                throw std::invalid_argument("InputSignal: pixel " + std::to_string(p) +
                                            " is not unit norm");
        }
        on_multisphere = true;
    }
};

inline InputSignal shift_signal(const InputSignal& s, int i) {
    const int d = s.pixels;
    const int sh = ((i % d) + d) % d;
    InputSignal out(s.channels, d);
    out.on_multisphere = s.on_multisphere;
    for (int c = 0; c < s.channels; ++c)
        for (int p = 0; p < d; ++p) out.at(c, p) = s.at(c, (p + sh) % d);
    return out;
}

// K(x,z) / sqrt(K(x,x) K(z,z)). Degenerate self-values are an error.
inline double normalize(double value, double self_x, double self_z) {
    if (!(self_x > 0.0) || !(self_z > 0.0))
        throw std::invalid_argument("normalize: self kernel values must be positive");
    return value / std::sqrt(self_x * self_z);
}

// Cosine vector of a multi-sphere pair.
inline CosineVector cosines(const InputSignal& a, const InputSignal& b) {
    if (a.channels != b.channels || a.pixels != b.pixels)
        throw std::invalid_argument("cosines: shape mismatch");
    std::vector<double> t(static_cast<std::size_t>(a.pixels));
    for (int p = 0; p < a.pixels; ++p) t[static_cast<std::size_t>(p)] = a.pixel_dot(b, p, p);
    return CosineVector(std::move(t));
}

// Realizes a cosine vector as a multi-sphere pair (x, z); any realization
// gives the same multi-dot-product kernel values.
inline std::pair<InputSignal, InputSignal> realize_pair(const CosineVector& t, int channels) {
    if (channels < 2) throw std::invalid_argument("realize_pair: need at least two channels");
    const int d = t.dim();
    InputSignal x(channels, d), z(channels, d);
    for (int p = 0; p < d; ++p) {
        x.at(0, p) = 1.0;
        z.at(0, p) = t[p];
        z.at(1, p) = std::sqrt(std::max(0.0, 1.0 - t[p] * t[p]));
    }
    x.on_multisphere = true;
    z.on_multisphere = true;
    return {x, z};
}

}  // namespace reskern
