#pragma once

#include <cstdint>
#include <random>

namespace starbsde {

/// Seeded generator for sampled controls and dual scenarios.
///
/// All randomized checks draw through this wrapper so that a (seed, draw
/// order) pair fully determines the output. uniform() avoids
/// std::uniform_real_distribution to keep the byte stream identical across
/// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

private:
    std::mt19937_64 engine_;
};

} // namespace starbsde
