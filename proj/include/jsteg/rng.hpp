#pragma once

#include <cstdint>

namespace jsteg {

// Deterministic randomness is built on SplitMix64 (Steele, Lea & Flood,
// "Fast splittable pseudorandom number generators"). The generator is used
// in counter mode: draw k of stream `seed` is mix(seed + (k+1)*GAMMA), which
// equals the k-th output of sequentially iterated SplitMix64 and allows
// random access. This generator is part of the reproducibility contract and
// must not be swapped silently.
namespace rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// k-th 64-bit draw of the stream identified by `seed`.
inline std::uint64_t at(std::uint64_t seed, std::uint64_t k) {
    return mix(seed + (k + 1) * kGamma);
}

/// Uniform double in [0, 1) with 53-bit resolution.
inline double uniform_at(std::uint64_t seed, std::uint64_t k) {
    return static_cast<double>(at(seed, k) >> 11) * 0x1.0p-53;
}

/// Derives an independent per-item stream from a base seed, e.g. one noise
/// stream per image in a corpus.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t item) {
    return mix(seed ^ mix(item + kGamma));
}

/// Small sequential convenience wrapper around the counter-mode core.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() { return at(seed_, counter_++); }
    double next_uniform() { return uniform_at(seed_, counter_++); }

    /// Uniform integer in [0, bound) via rejection-free 128-bit multiply.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace rng
}  // namespace jsteg
