#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "reskern/types.hpp"

namespace reskern {

// splitmix64 step; also used to derive independent substreams from a root
// seed, so draw i is identical no matter how work is partitioned.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t root, std::uint64_t index) {
    std::uint64_t s = root ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    splitmix64(s);
    return splitmix64(s);
}

// Deterministic standard-normal stream (Box-Muller over splitmix64).
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) : state_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    void fill(double* dst, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) dst[i] = (*this)();
    }

    double uniform() {  // in [0,1)
        return static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// n points uniform on the multi-sphere: per-pixel normalized Gaussian columns.
inline std::vector<InputSignal> sample_multisphere(int n, int channels, int pixels,
                                                   std::uint64_t seed) {
    std::vector<InputSignal> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        NormalStream g(substream_seed(seed, static_cast<std::uint64_t>(i)));
        InputSignal s(channels, pixels);
        for (int p = 0; p < pixels; ++p) {
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (int c = 0; c < channels; ++c) {
                    s.at(c, p) = g();
                    norm2 += s.at(c, p) * s.at(c, p);
                }
            } while (norm2 < 1e-24);
            const double inv = 1.0 / std::sqrt(norm2);
            for (int c = 0; c < channels; ++c) s.at(c, p) *= inv;
        }
        s.on_multisphere = true;
        out.push_back(std::move(s));
    }
    return out;
}

// Random cosine vector with entries uniform in [lo, hi].
inline CosineVector sample_cosine(int pixels, std::uint64_t seed, double lo = -1.0,
                                  double hi = 1.0) {
    NormalStream g(seed);
    std::vector<double> t(static_cast<std::size_t>(pixels));
    for (double& u : t) u = lo + (hi - lo) * g.uniform();
    return CosineVector(std::move(t));
}

}  // namespace reskern
