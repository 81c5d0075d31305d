#pragma once

#include <sodium.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "optrng/bitstream.hpp"
#include "optrng/random.hpp"

namespace optrng {

inline constexpr double kCorrelatorClockHz = 20.0e6;

/// Attenuated-laser source split by a polarizing beam splitter onto two detectors.
struct CoherentSourceConfig {
    double mean_photons = 0.1;  ///< Poisson mean per clock cycle
    double clock_rate = kCorrelatorClockHz;
    /// Peak deviation of the detector-1 probability from 1/2.
    double bias_amplitude = 0.0;
    /// Period of the balance deviation in cycles; nullopt holds it at its peak.
    std::optional<double> bias_period;
    /// Static detector imbalance added to the detector-1 probability.
    double static_offset = 0.0;
    std::uint64_t seed = 1;

    /**
     * Probability that a photon reaches detector 1 ('0') in clock cycle `cycle`:
     * q(t) = 1/2 + offset + a * sin^2(pi t / period), so the balance drifts
     * periodically between 1/2 + offset and 1/2 + offset + a.
     */
    double detector1_probability(std::uint64_t cycle) const noexcept {
        if (!bias_period) return 0.5 + static_offset + bias_amplitude;
        const double s = std::sin(std::numbers::pi * static_cast<double>(cycle) / *bias_period);
        return 0.5 + static_offset + bias_amplitude * s * s;
    }

    void validate() const {
        if (!(mean_photons >= 0.0) || !std::isfinite(mean_photons)) throw DomainError("mean_photons must be >= 0");
        if (!(clock_rate >= 0.0)) throw DomainError("clock_rate must be >= 0");
        if (!(bias_amplitude >= 0.0 && bias_amplitude <= 0.5)) throw DomainError("bias_amplitude must lie in [0, 0.5]");
        if (bias_period && !(*bias_period > 0.0)) throw DomainError("bias_period must be positive");
        const double lo = 0.5 + static_offset;
        const double hi = lo + bias_amplitude;
        if (!(lo >= 0.0 && hi <= 1.0)) throw DomainError("detector probability leaves [0, 1]");
    }
};

/// SPDC pair source: one photon heralds its partner, which a PBS routes to D1 or D2.
struct HeraldedSourceConfig {
    double base_p = 0.5;  ///< initial probability of a '1'
    double drift_step = 0.0;
    double drift_lo = 0.45;
    double drift_hi = 0.55;
    std::uint64_t seed = 2;

    void validate() const {
        if (!(drift_lo > 0.0 && drift_hi < 1.0 && drift_lo <= drift_hi)) {
            throw DomainError("drift bounds must satisfy 0 < lo <= hi < 1");
        }
        if (!(base_p > 0.0 && base_p < 1.0)) throw DomainError("base_p must lie in (0, 1)");
        if (drift_step > 0.0 && !(base_p >= drift_lo && base_p <= drift_hi)) {
            throw DomainError("base_p must lie within the drift bounds");
        }
        if (!(drift_step >= 0.0)) throw DomainError("drift_step must be >= 0");
    }
};

enum class Interleave { stochastic, periodic };

inline std::string to_string(Interleave i) { return i == Interleave::stochastic ? "stochastic" : "periodic"; }

inline Interleave parse_interleave(const std::string& s) {
    if (s == "stochastic") return Interleave::stochastic;
    if (s == "periodic") return Interleave::periodic;
    throw DomainError("unknown interleave mode: " + s);
}

struct HybridSourceConfig {
    CoherentSourceConfig coherent;
    HeraldedSourceConfig heralded;
    double mean_spacing = 20.0;  ///< coherent bits per heralded bit
    Interleave interleave = Interleave::stochastic;
    std::uint64_t seed = 3;

    void validate() const {
        coherent.validate();
        heralded.validate();
        if (!(mean_spacing >= 1.0)) throw DomainError("mean spacing must be >= 1");
    }
};

struct GenerationLog {
    std::uint64_t emitted_bits = 0;
    std::uint64_t empty_cycles = 0;
    std::uint64_t coincidence_discards = 0;
    std::uint64_t elapsed_cycles = 0;
};

/// Clock-driven simulator of the coherent source; state advances one event at a time.
class CoherentSimulator {
public:
    explicit CoherentSimulator(const CoherentSourceConfig& cfg)
        : cfg_(cfg), rng_(cfg.seed), p_event_(-std::expm1(-cfg.mean_photons)) {
        cfg_.validate();
    }

    /**
     * Runs until a bit is emitted or `cycle_limit` cycles have elapsed in total.
     * Empty cycles are skipped geometrically; each photon of a non-empty cycle
     * independently goes to D1 with probability q(t). A cycle where both
     * detectors fire is discarded.
     */
    std::optional<bool> next(std::uint64_t cycle_limit) {
        while (log_.elapsed_cycles < cycle_limit) {
            const std::uint64_t gap = rng_.geometric(p_event_);
            const std::uint64_t remaining = cycle_limit - log_.elapsed_cycles;
            if (gap >= remaining) {
                log_.empty_cycles += remaining;
                log_.elapsed_cycles = cycle_limit;
                return std::nullopt;
            }
            log_.empty_cycles += gap;
            const std::uint64_t t = log_.elapsed_cycles + gap;
            log_.elapsed_cycles = t + 1;

            const double q = cfg_.detector1_probability(t);
            const std::uint64_t photons = rng_.poisson_nonzero(cfg_.mean_photons);
            bool d1 = false;
            bool d2 = false;
            for (std::uint64_t i = 0; i < photons; ++i) {
                (rng_.bernoulli(q) ? d1 : d2) = true;
            }
            if (d1 && d2) {
                ++log_.coincidence_discards;
                continue;
            }
            ++log_.emitted_bits;
            return d2;
        }
        return std::nullopt;
    }

    /// Next emitted bit regardless of how many cycles it takes.
    bool next_bit() {
        if (p_event_ <= 0.0) throw DomainError("coherent source with zero mean photon number emits no bits");
        for (;;) {
            if (auto bit = next(std::numeric_limits<std::uint64_t>::max())) return *bit;
        }
    }

    const GenerationLog& log() const noexcept { return log_; }

private:
    CoherentSourceConfig cfg_;
    Xoshiro256pp rng_;
    double p_event_;
    GenerationLog log_;
};

/// Bernoulli bit source whose '1' probability performs a reflecting random walk.
class HeraldedSimulator {
public:
    explicit HeraldedSimulator(const HeraldedSourceConfig& cfg) : cfg_(cfg), rng_(cfg.seed), p_(cfg.base_p) {
        cfg_.validate();
    }

    bool next_bit() {
        const bool bit = rng_.bernoulli(p_);
        if (cfg_.drift_step > 0.0) {
            p_ += (rng_() >> 63) ? cfg_.drift_step : -cfg_.drift_step;
            if (p_ > cfg_.drift_hi) p_ = 2.0 * cfg_.drift_hi - p_;
            if (p_ < cfg_.drift_lo) p_ = 2.0 * cfg_.drift_lo - p_;
            p_ = std::clamp(p_, cfg_.drift_lo, cfg_.drift_hi);
        }
        return bit;
    }

    double probability() const noexcept { return p_; }

private:
    HeraldedSourceConfig cfg_;
    Xoshiro256pp rng_;
    double p_;
};

/// Bits emitted during exactly `cycles` clock cycles.
inline std::pair<BitSequence, GenerationLog> simulate_coherent(const CoherentSourceConfig& cfg, std::uint64_t cycles) {
    CoherentSimulator sim(cfg);
    BitBuilder out(static_cast<std::size_t>(static_cast<double>(cycles) * (-std::expm1(-cfg.mean_photons))) + 64);
    while (auto bit = sim.next(cycles)) out.push_back(*bit);
    return {std::move(out).build(), sim.log()};
}

/// Runs the coherent source until `bits` bits have been emitted.
inline std::pair<BitSequence, GenerationLog> simulate_coherent_bits(const CoherentSourceConfig& cfg, std::size_t bits) {
    CoherentSimulator sim(cfg);
    BitBuilder out(bits);
    for (std::size_t i = 0; i < bits; ++i) out.push_back(sim.next_bit());
    return {std::move(out).build(), sim.log()};
}

inline BitSequence simulate_heralded(const HeraldedSourceConfig& cfg, std::size_t count) {
    HeraldedSimulator sim(cfg);
    BitBuilder out(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(sim.next_bit());
    return std::move(out).build();
}

struct HybridLog {
    GenerationLog coherent;
    std::uint64_t heralded_bits = 0;
};

/**
 * Coherent stream with heralded bits interleaved at mean spacing Omega.
 *
 * stochastic: each output position is heralded with probability 1/(Omega+1),
 *             i.e. geometric gaps of mean Omega coherent bits.
 * periodic:   1-based positions ceil(Omega), 2*ceil(Omega), ... are heralded.
 */
inline std::pair<BitSequence, HybridLog> simulate_hybrid_logged(const HybridSourceConfig& cfg, std::size_t total_bits) {
    cfg.validate();
    CoherentSimulator coherent(cfg.coherent);
    HeraldedSimulator heralded(cfg.heralded);
    Xoshiro256pp interleave_rng(cfg.seed);

    const double p_heralded = std::isinf(cfg.mean_spacing) ? 0.0 : 1.0 / (cfg.mean_spacing + 1.0);
    const double period = std::ceil(cfg.mean_spacing);

    BitBuilder out(total_bits);
    HybridLog log;
    std::uint64_t next_heralded = 0;  // 0-based position of the next heralded bit
    if (cfg.interleave == Interleave::stochastic) {
        next_heralded = interleave_rng.geometric(p_heralded);
    } else {
        next_heralded = period >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max()
                                         : static_cast<std::uint64_t>(period) - 1;
    }
    for (std::size_t pos = 0; pos < total_bits; ++pos) {
        if (pos == next_heralded) {
            out.push_back(heralded.next_bit());
            ++log.heralded_bits;
            if (cfg.interleave == Interleave::stochastic) {
                const std::uint64_t gap = interleave_rng.geometric(p_heralded);
                next_heralded = gap >= std::numeric_limits<std::uint64_t>::max() - pos ? gap : pos + 1 + gap;
            } else {
                next_heralded += static_cast<std::uint64_t>(period);
            }
        } else {
            out.push_back(coherent.next_bit());
        }
    }
    log.coherent = coherent.log();
    return {std::move(out).build(), log};
}

inline BitSequence simulate_hybrid(const HybridSourceConfig& cfg, std::size_t total_bits) {
    return simulate_hybrid_logged(cfg, total_bits).first;
}

/**
 * Software reference source: ChaCha20 (IETF) keystream bits.
 * The 256-bit key is four SplitMix64 outputs of `seed` (little-endian); nonce is zero.
 */
inline BitSequence software_source(std::size_t count, std::uint64_t seed) {
    if (sodium_init() < 0) throw Error("libsodium initialisation failed");
    std::array<unsigned char, crypto_stream_chacha20_ietf_KEYBYTES> key{};
    std::array<unsigned char, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
    std::uint64_t state = seed;
    for (std::size_t w = 0; w < 4; ++w) {
        const std::uint64_t word = splitmix64(state);
        for (std::size_t b = 0; b < 8; ++b) key[8 * w + b] = static_cast<unsigned char>(word >> (8 * b));
    }
    std::vector<std::uint8_t> bytes(BitSequence::byte_count(count));
    if (!bytes.empty()) {
        crypto_stream_chacha20_ietf(bytes.data(), bytes.size(), nonce.data(), key.data());
    }
    return BitSequence(std::move(bytes), count);
}

/// Detection-limited bit rate clock * (1 - e^-lambda).
inline double event_rate(double clock_hz, double mean_photons) {
    if (!(clock_hz >= 0.0) || !(mean_photons >= 0.0)) throw DomainError("event_rate needs non-negative arguments");
    return clock_hz * -std::expm1(-mean_photons);
}

/// Probability of two or more photons in a cycle, 1 - e^-lambda (1 + lambda).
inline double multiphoton_prob(double mean_photons) {
    if (!(mean_photons >= 0.0)) throw DomainError("mean photon number must be >= 0");
    return -std::expm1(-mean_photons) - mean_photons * std::exp(-mean_photons);
}

}  // namespace optrng
