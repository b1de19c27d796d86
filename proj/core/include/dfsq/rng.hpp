// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dfsq {

/// SplitMix64 mixing step (Steele, Lea & Flood; the java.util.SplittableRandom
/// finalizer). Used to derive independent per-(sample, channel) seeds from a
/// base seed so that parallel execution order cannot change results.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed for the work unit (sample, channel) under a base seed: two SplitMix64
/// rounds, one per coordinate.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t sample,
                                    std::uint64_t channel) noexcept {
    return splitmix64(splitmix64(base + sample) + channel);
}

/// Deterministic random source: std::mt19937_64 (whose output sequence the
/// C++ standard fixes exactly) plus hand-rolled uniform/normal transforms, so
/// streams are reproducible across standard libraries and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), unbiased by rejection.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t threshold = n == 0 ? 0 : (0ull - n) % n;
        for (;;) {
            const std::uint64_t r = gen_();
            if (r >= threshold) return r % n;
        }
    }

    /// Standard normal via Box-Muller; the spare variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace dfsq
