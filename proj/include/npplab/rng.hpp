#pragma once

// Deterministic, counter-based randomness. Every draw is a pure function of
// (seed, index), so trial-level parallelism can never change results.
//
// Normal variates come from Box-Muller on the counter stream. The formula is
// pinned, but bit-identical output across platforms additionally requires
// identical rounding in log/cos/sqrt; glibc libm is the reference here.

#include <cmath>
#include <cstdint>

namespace npplab {

namespace rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer. Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// index-th word of the stream keyed by seed. Injective in index for a fixed
// seed (kGolden is odd, mix64 is a bijection).
inline std::uint64_t stream(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + (index + 1) * kGolden);
}

// Map a word to (0, 1]; never 0, so log() below is safe.
inline double to_unit(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// i-th standard normal of the stream keyed by seed. Uses the cosine branch of
// Box-Muller only; each variate consumes two counter words.
inline double normal(std::uint64_t seed, std::uint64_t i) {
    const double u1 = to_unit(stream(seed, 2 * i));
    const double u2 = to_unit(stream(seed, 2 * i + 1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Sequential generator for inherently serial consumers (MCMC chains, greedy
// scan orders). Same mixing as stream().
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    double next_unit() { return to_unit(next()); }

    // Uniform index in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // 128-bit multiply avoids the modulo bias for the n we use.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace rng

// Per-trial seed derivation used by every experiment loop: injective in
// trial_index for a fixed master seed. Frozen; output files depend on it.
inline std::uint64_t seed_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
    return rng::stream(master_seed, trial_index);
}

}  // namespace npplab
