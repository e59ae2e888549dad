#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace reskern {

// Inputs within this band of [-1,1] are clamped to the boundary; anything
// further out is a genuine domain violation and throws.
inline constexpr double kUnitClampBand = 1e-12;

inline double clamp_unit(double u, const char* who) {
    if (u > 1.0) {
        if (u > 1.0 + kUnitClampBand)
            throw std::domain_error(std::string(who) + ": argument " + std::to_string(u) +
                                    " outside [-1,1]");
        return 1.0;
    }
    if (u < -1.0) {
        if (u < -1.0 - kUnitClampBand)
            throw std::domain_error(std::string(who) + ": argument " + std::to_string(u) +
                                    " outside [-1,1]");
        return -1.0;
    }
    return u;
}

// Zeroth arc-cosine kernel, (pi - acos(u)) / pi. Monotone, maps [-1,1] -> [0,1].
inline double kappa0(double u) {
    u = clamp_unit(u, "kappa0");
    return (M_PI - std::acos(u)) / M_PI;
}

// First arc-cosine kernel, (sqrt(1-u^2) + (pi - acos(u)) u) / pi.
// Fixed point at u = 1; kappa1(u) >= u on [-1,1].
inline double kappa1(double u) {
    u = clamp_unit(u, "kappa1");
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    return (s + (M_PI - std::acos(u)) * u) / M_PI;
}

}  // namespace reskern
