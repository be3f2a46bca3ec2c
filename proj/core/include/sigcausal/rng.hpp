#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sigcausal {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based substream seed: the same (seed, keys...) always yields the
/// same value regardless of how many other streams were drawn before it.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = splitmix64(seed);
    for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    return Rng(derive_seed(seed, keys));
}

/// Uniform draw from [lo, hi].
inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Uniform draw from [-hi, -lo] ∪ [lo, hi] (equal mass on both halves).
inline double uniform_signed(Rng& rng, double lo, double hi) {
    double v = uniform(rng, lo, hi);
    return std::bernoulli_distribution(0.5)(rng) ? v : -v;
}

}  // namespace sigcausal
