#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "optrng/bitstream.hpp"

namespace optrng {

enum class BitFormat { ascii01, packed };

inline std::string_view to_string(BitFormat f) noexcept { return f == BitFormat::ascii01 ? "ascii01" : "packed"; }

inline BitFormat parse_bit_format(std::string_view name) {
    if (name == "ascii01") return BitFormat::ascii01;
    if (name == "packed") return BitFormat::packed;
    throw DomainError("unknown bit format: " + std::string(name));
}

// Packed layout: 16-byte header followed by ceil(N/8) payload bytes.
//   offset 0  magic "OPRB"
//   offset 4  version, uint32 little-endian
//   offset 8  bit count N, uint64 little-endian
// Payload bit i is bit (i % 8) of byte (i / 8); padding bits must be zero.
inline constexpr std::array<char, 4> kPackedMagic{'O', 'P', 'R', 'B'};
inline constexpr std::uint32_t kPackedVersion = 1;
inline constexpr std::size_t kPackedHeaderSize = 16;

namespace detail {

template <typename T>
void put_le(std::string& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFFu));
}

template <typename T>
T get_le(std::string_view in, std::size_t offset) {
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value |= static_cast<T>(static_cast<std::uint8_t>(in[offset + i])) << (8 * i);
    }
    return value;
}

}  // namespace detail

inline std::string encode_packed(const BitSequence& seq) {
    std::string out;
    out.reserve(kPackedHeaderSize + seq.bytes().size());
    out.append(kPackedMagic.data(), kPackedMagic.size());
    detail::put_le<std::uint32_t>(out, kPackedVersion);
    detail::put_le<std::uint64_t>(out, seq.size());
    out.append(reinterpret_cast<const char*>(seq.bytes().data()), seq.bytes().size());
    return out;
}

inline BitSequence decode_packed(std::string_view data) {
    if (data.size() < kPackedHeaderSize) throw MalformedFile("packed file shorter than its header");
    if (std::memcmp(data.data(), kPackedMagic.data(), kPackedMagic.size()) != 0) {
        throw MalformedFile("bad magic in packed file");
    }
    const auto version = detail::get_le<std::uint32_t>(data, 4);
    if (version != kPackedVersion) throw MalformedFile("unsupported packed version " + std::to_string(version));
    const auto bits = detail::get_le<std::uint64_t>(data, 8);
    const std::size_t payload = data.size() - kPackedHeaderSize;
    if (bits > static_cast<std::uint64_t>(payload) * 8 || BitSequence::byte_count(bits) != payload) {
        throw MalformedFile("declared length " + std::to_string(bits) + " bits is inconsistent with a " +
                            std::to_string(payload) + "-byte payload");
    }
    std::vector<std::uint8_t> bytes(data.begin() + kPackedHeaderSize, data.end());
    if ((bits & 7) != 0 && (bytes.back() >> (bits & 7)) != 0) {
        throw MalformedFile("nonzero padding bits in packed file");
    }
    return BitSequence(std::move(bytes), bits);
}

inline std::string encode_ascii01(const BitSequence& seq) { return seq.to_string() + "\n"; }

inline BitSequence decode_ascii01(std::string_view text) { return BitSequence::from_string(text); }

inline std::string encode(const BitSequence& seq, BitFormat format) {
    return format == BitFormat::packed ? encode_packed(seq) : encode_ascii01(seq);
}

inline BitSequence decode(std::string_view data, BitFormat format) {
    return format == BitFormat::packed ? decode_packed(data) : decode_ascii01(data);
}

inline std::string read_all(std::istream& in) {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path.string() + " for reading");
    std::string data = read_all(in);
    if (in.bad()) throw IoFailure("error while reading " + path.string());
    return data;
}

inline void write_file_bytes(const std::filesystem::path& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoFailure("error while writing " + path.string());
}

inline BitSequence read_bits(const std::filesystem::path& path, BitFormat format) {
    return decode(read_file_bytes(path), format);
}

inline void write_bits(const std::filesystem::path& path, const BitSequence& seq, BitFormat format) {
    write_file_bytes(path, encode(seq, format));
}

}  // namespace optrng
