#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "optrng/errors.hpp"

namespace optrng {

/**
 * Immutable binary sequence with packed storage.
 *
 * Bit i lives in byte i/8 at bit position i%8 (least significant bit first),
 * which is also the payload layout of the packed file format. Padding bits in
 * the final byte are always zero, so byte-wise comparisons and popcounts are
 * exact.
 */
class BitSequence {
public:
    BitSequence() = default;

    /// Takes ownership of packed bytes; padding bits beyond `length` are cleared.
    BitSequence(std::vector<std::uint8_t> bytes, std::size_t length)
        : bytes_(std::move(bytes)), length_(length) {
        if (bytes_.size() != byte_count(length_)) {
            throw LengthMismatch("packed storage does not match bit length");
        }
        clear_padding();
    }

    /// One element per bit; any nonzero value is a '1'.
    static BitSequence from_bits(std::span<const std::uint8_t> bits) {
        std::vector<std::uint8_t> bytes(byte_count(bits.size()), 0);
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i]) bytes[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
        }
        return BitSequence(std::move(bytes), bits.size());
    }

    /// Parses '0'/'1' characters; whitespace is skipped, anything else throws.
    static BitSequence from_string(std::string_view text) {
        std::vector<std::uint8_t> bits;
        bits.reserve(text.size());
        for (char c : text) {
            if (c == '0' || c == '1') {
                bits.push_back(c == '1');
            } else if (c != ' ' && c != '\n' && c != '\r' && c != '\t' && c != '\v' && c != '\f') {
                throw MalformedFile(std::string("unexpected character in bit text: '") + c + "'");
            }
        }
        return from_bits(bits);
    }

    static constexpr std::size_t byte_count(std::size_t bits) noexcept { return (bits + 7) / 8; }

    std::size_t size() const noexcept { return length_; }
    bool empty() const noexcept { return length_ == 0; }

    bool operator[](std::size_t i) const noexcept { return (bytes_[i >> 3] >> (i & 7)) & 1u; }

    bool at(std::size_t i) const {
        if (i >= length_) throw std::out_of_range("bit index out of range");
        return (*this)[i];
    }

    std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

    std::size_t count_ones() const noexcept {
        std::size_t ones = 0;
        for (std::uint8_t b : bytes_) ones += static_cast<std::size_t>(std::popcount(b));
        return ones;
    }

    /// One byte (0 or 1) per bit, the layout the statistical tests scan.
    std::vector<std::uint8_t> unpack() const {
        std::vector<std::uint8_t> out(length_);
        for (std::size_t i = 0; i < length_; ++i) out[i] = (*this)[i];
        return out;
    }

    BitSequence slice(std::size_t offset, std::size_t count) const {
        if (offset > length_ || count > length_ - offset) {
            throw std::out_of_range("slice exceeds sequence");
        }
        std::vector<std::uint8_t> bytes(byte_count(count), 0);
        if ((offset & 7) == 0) {
            std::copy_n(bytes_.begin() + static_cast<std::ptrdiff_t>(offset >> 3), bytes.size(), bytes.begin());
            BitSequence out;
            out.bytes_ = std::move(bytes);
            out.length_ = count;
            out.clear_padding();
            return out;
        }
        for (std::size_t i = 0; i < count; ++i) {
            if ((*this)[offset + i]) bytes[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
        }
        return BitSequence(std::move(bytes), count);
    }

    BitSequence complement() const {
        std::vector<std::uint8_t> bytes(bytes_.size());
        for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<std::uint8_t>(~bytes_[i]);
        return BitSequence(std::move(bytes), length_);
    }

    std::string to_string() const {
        std::string s(length_, '0');
        for (std::size_t i = 0; i < length_; ++i) {
            if ((*this)[i]) s[i] = '1';
        }
        return s;
    }

    friend bool operator==(const BitSequence&, const BitSequence&) = default;

private:
    void clear_padding() noexcept {
        if (length_ & 7) bytes_.back() &= static_cast<std::uint8_t>((1u << (length_ & 7)) - 1u);
    }

    std::vector<std::uint8_t> bytes_;
    std::size_t length_ = 0;
};

/// Append-only construction of a BitSequence.
class BitBuilder {
public:
    BitBuilder() = default;
    explicit BitBuilder(std::size_t reserve_bits) { bytes_.reserve(BitSequence::byte_count(reserve_bits)); }

    void push_back(bool bit) {
        if ((length_ & 7) == 0) bytes_.push_back(0);
        if (bit) bytes_.back() |= static_cast<std::uint8_t>(1u << (length_ & 7));
        ++length_;
    }

    void append(const BitSequence& seq) {
        if ((length_ & 7) == 0) {
            bytes_.insert(bytes_.end(), seq.bytes().begin(), seq.bytes().end());
            length_ += seq.size();
            return;
        }
        for (std::size_t i = 0; i < seq.size(); ++i) push_back(seq[i]);
    }

    std::size_t size() const noexcept { return length_; }

    BitSequence build() && { return BitSequence(std::move(bytes_), length_); }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t length_ = 0;
};

inline BitSequence concat(std::span<const BitSequence> parts) {
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    BitBuilder b(total);
    for (const auto& p : parts) b.append(p);
    return std::move(b).build();
}

struct BalanceStats {
    std::int64_t discrepancy = 0;  ///< ones - zeros
    double balance = 1.0;          ///< (N + |D|) / (N - |D|); +inf for constant sequences
    std::size_t ones = 0;
    std::size_t zeros = 0;
};

/// Sum of +1 per '1' and -1 per '0'.
inline std::int64_t discrepancy(const BitSequence& seq) noexcept {
    const auto ones = static_cast<std::int64_t>(seq.count_ones());
    return 2 * ones - static_cast<std::int64_t>(seq.size());
}

/// Imbalance ratio B = (N + |D|) / (N - |D|); 1 means perfectly balanced.
inline double balance(const BitSequence& seq) {
    const auto n = static_cast<std::int64_t>(seq.size());
    const std::int64_t d = std::llabs(discrepancy(seq));
    if (n == d) throw ConstantSequence();
    return static_cast<double>(n + d) / static_cast<double>(n - d);
}

/// Counts plus discrepancy; `balance` is +inf for constant (or empty) sequences.
inline BalanceStats balance_stats(const BitSequence& seq) {
    BalanceStats s;
    s.ones = seq.count_ones();
    s.zeros = seq.size() - s.ones;
    s.discrepancy = discrepancy(seq);
    const auto n = static_cast<std::int64_t>(seq.size());
    const std::int64_t d = std::llabs(s.discrepancy);
    s.balance = n == d ? std::numeric_limits<double>::infinity()
                       : static_cast<double>(n + d) / static_cast<double>(n - d);
    return s;
}

struct Chunks {
    std::vector<BitSequence> chunks;
    BitSequence remainder;
    bool has_remainder() const noexcept { return !remainder.empty(); }
};

/// Splits into floor(N/n) consecutive length-n chunks plus the trailing remainder.
inline Chunks chunk(const BitSequence& seq, std::size_t n) {
    if (n == 0) throw DomainError("chunk length must be positive");
    Chunks out;
    const std::size_t full = seq.size() / n;
    out.chunks.reserve(full);
    for (std::size_t c = 0; c < full; ++c) out.chunks.push_back(seq.slice(c * n, n));
    out.remainder = seq.slice(full * n, seq.size() - full * n);
    return out;
}

}  // namespace optrng
