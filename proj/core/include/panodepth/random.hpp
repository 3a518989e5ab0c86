#pragma once

// Seeded draws built directly on mt19937_64 output so results are identical
// across standard libraries (std distributions are implementation-defined).

#include <cmath>
#include <random>

#include "panodepth/geometry.hpp"

namespace panodepth {

/// Uniform in [0, 1) with 53 random bits.
inline double uniform_double(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller.
inline double gaussian(std::mt19937_64& rng) {
    double u1 = uniform_double(rng);
    while (u1 == 0.0) u1 = uniform_double(rng);
    const double u2 = uniform_double(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

}  // namespace panodepth
