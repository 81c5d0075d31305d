#pragma once

#include <cstddef>
#include <string>

#include "optrng/errors.hpp"

namespace optrng::nist {

/// Per-test parameters; defaults target 2e6-bit sequences.
struct TestParams {
    std::size_t block_frequency_m = 20000;

    std::size_t non_overlapping_m = 9;
    std::size_t non_overlapping_blocks = 8;
    /// Number of aperiodic templates evaluated, in ascending order; 0 means all of them.
    std::size_t non_overlapping_templates = 0;

    std::size_t overlapping_m = 9;
    std::size_t overlapping_block = 1032;

    std::size_t rank_rows = 32;
    std::size_t rank_cols = 32;

    std::size_t linear_complexity_m = 1000;

    std::size_t universal_l = 7;
    std::size_t universal_q = 1280;

    std::size_t serial_m = 10;
    std::size_t approximate_entropy_m = 10;

    /// The full template set (148 templates of length 9).
    static TestParams full() { return {}; }

    /// Two templates, giving 42 p-values per applicable sequence across the battery.
    static TestParams reduced() {
        TestParams p;
        p.non_overlapping_templates = 2;
        return p;
    }

    static TestParams profile(const std::string& name) {
        if (name == "full") return full();
        if (name == "reduced") return reduced();
        throw DomainError("unknown test profile: " + name);
    }

    void validate() const {
        auto require = [](bool ok, const char* what) {
            if (!ok) throw DomainError(std::string("invalid test parameter: ") + what);
        };
        require(block_frequency_m >= 1, "block_frequency_m >= 1");
        require(non_overlapping_m >= 2 && non_overlapping_m <= 16, "2 <= non_overlapping_m <= 16");
        require(non_overlapping_blocks >= 1, "non_overlapping_blocks >= 1");
        require(overlapping_m >= 2 && overlapping_m <= 32, "2 <= overlapping_m <= 32");
        require(overlapping_block > overlapping_m, "overlapping_block > overlapping_m");
        require(rank_rows >= 2 && rank_rows <= 64 && rank_cols >= 2 && rank_cols <= 64, "rank dims in [2, 64]");
        require(linear_complexity_m >= 2, "linear_complexity_m >= 2");
        require(universal_l >= 6 && universal_l <= 16, "6 <= universal_l <= 16");
        require(universal_q >= 1, "universal_q >= 1");
        require(serial_m >= 2 && serial_m <= 24, "2 <= serial_m <= 24");
        require(approximate_entropy_m >= 1 && approximate_entropy_m <= 23, "1 <= approximate_entropy_m <= 23");
    }
};

}  // namespace optrng::nist
