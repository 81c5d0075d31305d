#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>

#include "optrng/bitstream.hpp"
#include "optrng/bitstream_io.hpp"

using namespace optrng;

namespace {

BitSequence from_mask(unsigned mask, std::size_t n) {
    BitBuilder b;
    for (std::size_t i = 0; i < n; ++i) b.push_back((mask >> i) & 1u);
    return std::move(b).build();
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("optrng_unit_" + name);
}

}  // namespace

TEST(Discrepancy, FootnoteSequence) {
    EXPECT_EQ(discrepancy(BitSequence::from_string("1011010101")), 2);
}

TEST(Discrepancy, EmptyAndAllZeros) {
    EXPECT_EQ(discrepancy(BitSequence{}), 0);
    EXPECT_EQ(discrepancy(BitSequence::from_string("0000")), -4);
}

TEST(Balance, FootnoteSequence) {
    // (10 + 2) / (10 - 2)
    EXPECT_DOUBLE_EQ(balance(BitSequence::from_string("1011010101")), 1.5);
}

TEST(Balance, PerfectAndConstant) {
    EXPECT_DOUBLE_EQ(balance(BitSequence::from_string("01")), 1.0);
    EXPECT_THROW(balance(BitSequence::from_string("1111")), ConstantSequence);
    EXPECT_THROW(balance(BitSequence{}), ConstantSequence);
}

TEST(Balance, ExhaustiveCountsUpToTwelve) {
    for (std::size_t n = 0; n <= 12; ++n) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            const auto seq = from_mask(mask, n);
            const auto st = balance_stats(seq);
            const auto ones = static_cast<std::size_t>(std::popcount(mask));
            ASSERT_EQ(st.ones, ones);
            ASSERT_EQ(st.zeros + st.ones, n);
            ASSERT_EQ(st.discrepancy, static_cast<std::int64_t>(ones) - static_cast<std::int64_t>(n - ones));
            ASSERT_LE(std::llabs(st.discrepancy), static_cast<long long>(n));
        }
    }
}

TEST(Balance, PermutationInvariant) {
    std::mt19937 gen(11);
    auto bits = BitSequence::from_string("1110010111010000111011").unpack();
    const double b0 = balance(BitSequence::from_bits(bits));
    for (int i = 0; i < 20; ++i) {
        std::shuffle(bits.begin(), bits.end(), gen);
        EXPECT_DOUBLE_EQ(balance(BitSequence::from_bits(bits)), b0);
    }
}

TEST(BitSequence, PaddingIsInvisible) {
    const auto a = BitSequence::from_string("1011");
    EXPECT_EQ(a.size(), 4u);
    EXPECT_EQ(a.bytes().size(), 1u);
    EXPECT_EQ(a.bytes()[0], 0b1101);  // LSB-first
    const BitSequence cleared({0xFF}, 4);
    EXPECT_EQ(cleared.bytes()[0], 0x0F);
    EXPECT_EQ(cleared, BitSequence::from_string("1111"));
    EXPECT_THROW(BitSequence({0x01, 0x00}, 4), LengthMismatch);
    EXPECT_EQ(a.complement().to_string(), "0100");
    EXPECT_EQ(a.complement().bytes()[0], 0b0010);
}

TEST(BitSequence, SliceAtUnalignedOffsets) {
    const std::string s = "110100111010110001011100101";
    const auto seq = BitSequence::from_string(s);
    for (std::size_t off = 0; off < s.size(); ++off) {
        for (std::size_t len = 0; off + len <= s.size(); ++len) {
            ASSERT_EQ(seq.slice(off, len).to_string(), s.substr(off, len));
        }
    }
    EXPECT_THROW(seq.slice(20, 10), std::out_of_range);
}

TEST(BitSequence, RejectsForeignCharacters) {
    EXPECT_EQ(BitSequence::from_string(" 01\n1 0\t").to_string(), "0110");
    EXPECT_THROW(BitSequence::from_string("01x0"), MalformedFile);
}

TEST(Chunk, Arithmetic) {
    const auto seq = BitSequence::from_string("10110100111010100101");
    const auto c = chunk(seq, 8);
    ASSERT_EQ(c.chunks.size(), 2u);
    EXPECT_TRUE(c.has_remainder());
    EXPECT_EQ(c.remainder.size(), 4u);
    EXPECT_EQ(c.chunks[0].to_string(), "10110100");
    EXPECT_EQ(c.chunks[1].to_string(), "11101010");
    EXPECT_EQ(c.remainder.to_string(), "0101");

    const auto exact = chunk(BitSequence::from_string("00001111"), 8);
    EXPECT_EQ(exact.chunks.size(), 1u);
    EXPECT_FALSE(exact.has_remainder());
    EXPECT_THROW(chunk(seq, 0), DomainError);
}

TEST(Chunk, ConcatRestoresInput) {
    std::mt19937_64 gen(5);
    std::vector<std::uint8_t> bits(1003);
    for (auto& b : bits) b = gen() & 1;
    const auto seq = BitSequence::from_bits(bits);
    for (std::size_t n : {1u, 3u, 8u, 13u, 64u, 1003u, 2000u}) {
        auto c = chunk(seq, n);
        auto parts = c.chunks;
        parts.push_back(c.remainder);
        EXPECT_EQ(concat(parts), seq) << n;
    }
}

TEST(PackedFormat, HeaderDrivenLength) {
    const auto seq = BitSequence::from_string("1011001110");
    const auto data = encode_packed(seq);
    ASSERT_EQ(data.size(), kPackedHeaderSize + 2);
    EXPECT_EQ(data.substr(0, 4), "OPRB");
    const auto back = decode_packed(data);
    EXPECT_EQ(back.size(), 10u);
    EXPECT_EQ(back, seq);
    EXPECT_EQ(encode_packed(back), data);
}

TEST(PackedFormat, RejectsInconsistentHeaders) {
    auto data = encode_packed(BitSequence::from_bits(std::vector<std::uint8_t>(32, 1)));
    // declare 100 bits over the 4-byte payload
    auto bad = data;
    bad[8] = 100;
    EXPECT_THROW(decode_packed(bad), MalformedFile);
    auto magic = data;
    magic[0] = 'X';
    EXPECT_THROW(decode_packed(magic), MalformedFile);
    auto version = data;
    version[4] = 9;
    EXPECT_THROW(decode_packed(version), MalformedFile);
    EXPECT_THROW(decode_packed(data.substr(0, 10)), MalformedFile);
    // nonzero padding bits
    auto padded = encode_packed(BitSequence::from_string("101"));
    padded.back() = static_cast<char>(0xFD);
    EXPECT_THROW(decode_packed(padded), MalformedFile);
}

TEST(FileIo, RoundTripBothFormats) {
    std::mt19937_64 gen(9);
    std::vector<std::uint8_t> bits(777);
    for (auto& b : bits) b = gen() & 1;
    const auto seq = BitSequence::from_bits(bits);
    for (auto fmt : {BitFormat::ascii01, BitFormat::packed}) {
        const auto path = temp_path(std::string(to_string(fmt)));
        write_bits(path, seq, fmt);
        EXPECT_EQ(read_bits(path, fmt), seq);
        if (fmt == BitFormat::packed) {
            const auto first = read_file_bytes(path);
            write_bits(path, read_bits(path, fmt), fmt);
            EXPECT_EQ(read_file_bytes(path), first);
        }
        std::filesystem::remove(path);
    }
}

TEST(FileIo, AsciiMapsDirectly) {
    const auto seq = decode_ascii01("0101");
    ASSERT_EQ(seq.size(), 4u);
    EXPECT_FALSE(seq[0]);
    EXPECT_TRUE(seq[1]);
    EXPECT_FALSE(seq[2]);
    EXPECT_TRUE(seq[3]);
}

TEST(FileIo, MissingFileIsIoFailure) {
    EXPECT_THROW(read_bits("/nonexistent/dir/file.bin", BitFormat::packed), IoFailure);
    EXPECT_THROW(write_bits("/nonexistent/dir/file.bin", BitSequence{}, BitFormat::packed), IoFailure);
    EXPECT_THROW(parse_bit_format("hex"), DomainError);
}
