#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace optrng {

/// SplitMix64 step; advances `state` and returns the mixed output.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/**
 * Sub-seed for stage `stream` of a run seeded with `root`.
 *
 * Counter scheme: the (stream + 1)-th SplitMix64 output started from `root`.
 * Stages therefore get decorrelated seeds and can be re-run in isolation.
 */
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) noexcept {
    std::uint64_t state = root + stream * 0x9E3779B97F4A7C15ULL;
    return splitmix64(state);
}

/// xoshiro256++ seeded through SplitMix64; models std::uniform_random_bit_generator.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    explicit constexpr Xoshiro256pp(std::uint64_t seed = 1) noexcept { this->seed(seed); }

    constexpr void seed(std::uint64_t seed) noexcept {
        std::uint64_t x = seed;
        for (auto& word : s_) word = splitmix64(x);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a logarithm argument.
    double uniform_open0() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /**
     * Number of failures before the first success of a Bernoulli(p) trial.
     * Returns max() when p == 0 (no success ever).
     */
    std::uint64_t geometric(double p) noexcept {
        if (p >= 1.0) return 0;
        if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
        const double g = std::floor(std::log(uniform_open0()) / std::log1p(-p));
        if (g >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
        return static_cast<std::uint64_t>(g);
    }

    /// Poisson(mean) by sequential inversion; intended for small means.
    std::uint64_t poisson(double mean) noexcept {
        if (mean <= 0.0) return 0;
        const double u = uniform();
        double term = std::exp(-mean);
        double cdf = term;
        std::uint64_t k = 0;
        while (u >= cdf && term > 0.0) {
            ++k;
            term *= mean / static_cast<double>(k);
            cdf += term;
        }
        return k;
    }

    /// Poisson(mean) conditioned on a value of at least one.
    std::uint64_t poisson_nonzero(double mean) noexcept {
        const double p0 = std::exp(-mean);
        const double u = p0 + uniform() * (1.0 - p0);
        double term = p0;
        double cdf = p0;
        std::uint64_t k = 0;
        do {
            ++k;
            term *= mean / static_cast<double>(k);
            cdf += term;
        } while (u >= cdf && term > 0.0);
        return k;
    }

    double normal() noexcept {
        // Box-Muller; the second variate is discarded to keep the state a pure function of draw count.
        const double u1 = uniform_open0();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace optrng
