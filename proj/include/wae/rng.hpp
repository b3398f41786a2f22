// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAE_RNG_HPP
#define WAE_RNG_HPP

#include <cmath>
#include <cstdint>

namespace wae {

/// Deterministic counter-based generator (splitmix64). Output depends only on
/// the seed and the draw index, so streams reproduce bit-exactly across
/// platforms and thread counts. Substreams are derived by remixing the seed
/// with a stream index, which keeps parallel consumers decorrelated without
/// any shared state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + next_double() * (hi - lo);
    }

    /// Standard normal via Box-Muller; consumes exactly two draws.
    double normal() {
        const double u1 = 1.0 - next_double(); // (0, 1]
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    /// Independent stream addressed by `index`; derivation is pure in
    /// (current state, index) and does not advance this generator.
    Rng substream(std::uint64_t index) const {
        return Rng(mix(state_ ^ mix(index + 0x632be59bd9b4e019ULL)));
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace wae

#endif // WAE_RNG_HPP
