// rng.hpp — counter-based uniform draws keyed by (seed, stream, index)
//
// Every draw is a pure function of its key, so disorder maps do not depend on
// iteration order or thread count.

#pragma once

#include <cstdint>

namespace bilayer {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index) noexcept {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (stream * 0xd1b54a32d192ed03ULL));
    h = splitmix64(h ^ index);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Uniform double in [-half_width, half_width].
constexpr double counter_symmetric(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t index, double half_width) noexcept {
    return half_width * (2.0 * counter_uniform(seed, stream, index) - 1.0);
}

} // namespace bilayer
