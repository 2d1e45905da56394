#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gmc {

// All randomized code in the library draws through these helpers so that a
// fixed seed reproduces bit-identical streams regardless of standard-library
// distribution internals.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [0, n), n > 0 (Lemire multiply-shift reduction).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(rng()) * static_cast<unsigned __int128>(n)) >> 64);
}

/// Standard normal deviate (Box-Muller, cosine branch); consumes exactly two draws.
inline double normal01(Rng& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    // 1 - u1 lies in (0, 1], so the log is finite.
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace gmc
