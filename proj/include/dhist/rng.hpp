// rng.hpp — Counter-based random streams: (seed, ids...) -> draw is a pure function,
// so results do not depend on thread scheduling or evaluation order.

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace dhist {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Hash-chain a list of stream identifiers into one 64-bit state.
inline std::uint64_t stream_key(std::initializer_list<std::uint64_t> ids) {
    std::uint64_t h = 0x6a09e667f3bcc909ull;
    for (std::uint64_t id : ids) h = mix64(h ^ mix64(id));
    return h;
}

// uniform in (0,1]
inline double uniform_from_bits(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

struct NormalPair {
    double first;
    double second;
};

// Two independent standard normals from one key (Box–Muller).
inline NormalPair normal_pair(std::uint64_t key) {
    const double u1 = uniform_from_bits(mix64(key ^ 0x243f6a8885a308d3ull));
    const double u2 = uniform_from_bits(mix64(key ^ 0x13198a2e03707344ull));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

inline double normal_draw(std::uint64_t key) { return normal_pair(key).first; }

inline double uniform_draw(std::uint64_t key) {
    return uniform_from_bits(mix64(key ^ 0xa4093822299f31d0ull));
}

}  // namespace dhist
