#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "optrng/bitstream.hpp"
#include "optrng/errors.hpp"

namespace optrng {

using BigInt = boost::multiprecision::cpp_int;

struct ExtractionStats {
    std::uint64_t input_bits = 0;
    std::uint64_t output_bits = 0;
    std::uint64_t discarded_bits = 0;  ///< input bits that produced no output (trailing partial block included)
    double yield = 0.0;                ///< output_bits / input_bits

    static ExtractionStats make(std::uint64_t in, std::uint64_t out, std::uint64_t discarded) {
        return {in, out, discarded, in == 0 ? 0.0 : static_cast<double>(out) / static_cast<double>(in)};
    }
};

/// Classical pair rule: 01 -> 0, 10 -> 1, equal pairs and an odd trailing bit are dropped.
inline std::pair<BitSequence, ExtractionStats> von_neumann(const BitSequence& seq) {
    BitBuilder out(seq.size() / 4);
    std::uint64_t discarded = seq.size() & 1;
    for (std::size_t i = 0; i + 1 < seq.size(); i += 2) {
        const bool a = seq[i];
        const bool b = seq[i + 1];
        if (a != b) {
            out.push_back(a);
            ++discarded;  // the second bit of a productive pair carries no output
        } else {
            discarded += 2;
        }
    }
    auto bits = std::move(out).build();
    return {bits, ExtractionStats::make(seq.size(), bits.size(), discarded)};
}

enum class BinomialMode { exact, approximate };

/// C(r, m) by the multiplicative scheme; every intermediate quotient is an integer.
inline BigInt binomial_exact(std::int64_t r, std::int64_t m) {
    if (r < 0 || m < 0 || m > r) throw DomainError("binomial requires 0 <= m <= r");
    m = std::min(m, r - m);
    BigInt c = 1;
    for (std::int64_t i = 0; i < m; ++i) {
        c *= (r - i);
        c /= (i + 1);
    }
    return c;
}

/// exp(lnG(r+1) - lnG(m+1) - lnG(r-m+1)); for benchmarking only, the codec never uses it.
inline double binomial_approx(double r, double m) {
    if (r < 0 || m < 0 || m > r) throw DomainError("binomial requires 0 <= m <= r");
    return std::exp(std::lgamma(r + 1.0) - std::lgamma(m + 1.0) - std::lgamma(r - m + 1.0));
}

/// Exponents of the set bits of `value` in increasing order.
inline std::vector<unsigned> set_bit_exponents(const BigInt& value) {
    std::vector<unsigned> out;
    if (value <= 0) return out;
    const unsigned top = static_cast<unsigned>(boost::multiprecision::msb(value));
    for (unsigned b = 0; b <= top; ++b) {
        if (boost::multiprecision::bit_test(value, b)) out.push_back(b);
    }
    return out;
}

/// Power-of-two block sizes of C(n, k): exponents b_1 < b_2 < ... with sum of 2^b_i = C(n, k).
inline std::vector<unsigned> block_decompose(std::int64_t n, std::int64_t k) {
    return set_bit_exponents(binomial_exact(n, k));
}

inline constexpr std::size_t kBabkinDefaultLength = 300;
inline constexpr std::size_t kBabkinMaxLength = 1024;

/**
 * Stream-numbering extractor state for a fixed block length n.
 *
 * A length-n word with k ones at 1-based positions i_1 < ... < i_k is numbered
 * Num = sum_m C(i_m - 1, m), its rank among all C(n, k) words of weight k.
 * C(n, k) is split into power-of-two blocks following its binary expansion
 * (smallest power first); a word whose number falls in block j of size 2^b_j
 * is replaced by the low b_j bits of its number, most significant first.
 *
 * The Pascal table holds (n+1)(n+2)/2 exact integers of at most n bits each,
 * roughly 3 MB at n = 300 and 70 MB at the n = 1024 ceiling.
 */
class BabkinCodec {
public:
    struct Block {
        unsigned exponent;  ///< block size is 2^exponent
        BigInt end;         ///< one past the last number in the block (running sum of sizes)
    };

    explicit BabkinCodec(std::size_t n = kBabkinDefaultLength) : n_(n) {
        if (n < 1 || n > kBabkinMaxLength) {
            throw DomainError("Babkin block length must lie in [1, " + std::to_string(kBabkinMaxLength) + "]");
        }
        pascal_.resize(n + 1);
        for (std::size_t r = 0; r <= n; ++r) {
            pascal_[r].resize(r + 1);
            pascal_[r][0] = 1;
            pascal_[r][r] = 1;
            for (std::size_t m = 1; m < r; ++m) pascal_[r][m] = pascal_[r - 1][m - 1] + pascal_[r - 1][m];
        }
        blocks_.resize(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            BigInt end = 0;
            for (unsigned b : set_bit_exponents(pascal_[n][k])) {
                end += BigInt(1) << b;
                blocks_[k].push_back({b, end});
            }
        }
    }

    std::size_t length() const noexcept { return n_; }

    /// C(r, m) from the table; zero when m > r.
    const BigInt& binomial(std::size_t r, std::size_t m) const {
        static const BigInt zero = 0;
        if (r > n_) throw DomainError("binomial index beyond codec table");
        return m > r ? zero : pascal_[r][m];
    }

    std::span<const Block> blocks(std::size_t k) const { return blocks_.at(k); }

    BigInt number(const BitSequence& word) const {
        check_length(word);
        return number_unchecked(word, 0);
    }

    /// Index (0-based) of the block holding `num` among the weight-k blocks.
    std::size_t block_index(std::size_t k, const BigInt& num) const {
        const auto& bl = blocks_.at(k);
        const auto it = std::upper_bound(bl.begin(), bl.end(), num,
                                         [](const BigInt& v, const Block& b) { return v < b.end; });
        if (it == bl.end()) throw DomainError("number exceeds C(n, k)");
        return static_cast<std::size_t>(it - bl.begin());
    }

    BitSequence encode(const BitSequence& word) const {
        check_length(word);
        BitBuilder out;
        encode_into(word, 0, out);
        return std::move(out).build();
    }

    /// Encodes word[offset, offset + n) and appends the output; returns the emitted bit count.
    std::size_t encode_into(const BitSequence& seq, std::size_t offset, BitBuilder& out) const {
        std::size_t k = 0;
        const BigInt num = number_unchecked(seq, offset, &k);
        const unsigned width = blocks_[k][block_index(k, num)].exponent;
        for (unsigned b = width; b-- > 0;) out.push_back(boost::multiprecision::bit_test(num, b));
        return width;
    }

private:
    void check_length(const BitSequence& word) const {
        if (word.size() != n_) {
            throw LengthMismatch("word has " + std::to_string(word.size()) + " bits, codec expects " +
                                 std::to_string(n_));
        }
    }

    BigInt number_unchecked(const BitSequence& seq, std::size_t offset, std::size_t* weight = nullptr) const {
        BigInt num = 0;
        std::size_t m = 0;
        for (std::size_t i = 1; i <= n_; ++i) {
            if (seq[offset + i - 1]) {
                ++m;
                if (m <= i - 1) num += pascal_[i - 1][m];
            }
        }
        if (weight) *weight = m;
        return num;
    }

    std::size_t n_;
    std::vector<std::vector<BigInt>> pascal_;
    std::vector<std::vector<Block>> blocks_;
};

/// Num(word) under a codec sized to the word.
inline BigInt babkin_number(const BitSequence& word, const BabkinCodec& codec) { return codec.number(word); }

inline BitSequence babkin_encode_subseq(const BitSequence& word, const BabkinCodec& codec) {
    return codec.encode(word);
}

/// Encodes consecutive length-n blocks; the trailing partial block is discarded.
inline std::pair<BitSequence, ExtractionStats> babkin_stream(const BitSequence& seq, const BabkinCodec& codec) {
    const std::size_t n = codec.length();
    if (n < 2) throw DomainError("stream numbering needs n >= 2");
    const std::size_t blocks = seq.size() / n;
    BitBuilder out(seq.size());
    std::uint64_t discarded = seq.size() - blocks * n;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t emitted = codec.encode_into(seq, b * n, out);
        discarded += n - emitted;
    }
    auto bits = std::move(out).build();
    return {bits, ExtractionStats::make(seq.size(), bits.size(), discarded)};
}

inline std::pair<BitSequence, ExtractionStats> babkin_stream(const BitSequence& seq, std::size_t n) {
    return babkin_stream(seq, BabkinCodec(n));
}

/// Replaces 1-based positions period, 2*period, ... of `base` with successive `quantum` bits.
inline BitSequence digital_mix(const BitSequence& base, const BitSequence& quantum, std::size_t period) {
    if (period == 0) throw DomainError("mixing period must be positive");
    const std::size_t needed = base.size() / period;
    if (quantum.size() < needed) {
        throw InsufficientQuantumBits("mixing needs " + std::to_string(needed) + " quantum bits, got " +
                                      std::to_string(quantum.size()));
    }
    BitBuilder out(base.size());
    std::size_t q = 0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        out.push_back((i + 1) % period == 0 ? quantum[q++] : base[i]);
    }
    return std::move(out).build();
}

}  // namespace optrng
