#pragma once

#include <cstdint>

namespace putlab {
namespace detail {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

}  // namespace detail

/// Counter-based uniform stream: the k-th deviate of a seeded stream is a
/// pure function of (seed, k), so any evaluation order or parallel split
/// reproduces the same samples. Output lies in [0, 1).
inline double uniform_at(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t z = detail::mix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

/// Derives an independent sub-stream seed (used for per-cell seeds in suites).
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
    return detail::mix64(seed ^ detail::mix64(0xd1b54a32d192ed03ULL * (stream + 1)));
}

}  // namespace putlab
