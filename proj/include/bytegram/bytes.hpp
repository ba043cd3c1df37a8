#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bytegram {

using Byte = std::uint8_t;
using ByteView = std::span<const Byte>;
using Bytes = std::vector<Byte>;

// Raw bytes of an N-gram. std::string compares with unsigned char semantics,
// so operator< is the lexicographic byte order used for every tie-break.
using Gram = std::string;

inline std::string_view as_chars(ByteView bytes) {
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const Byte*>(s.data()), s.size()};
}

std::string to_hex(std::string_view bytes);
inline std::string to_hex(ByteView bytes) { return to_hex(as_chars(bytes)); }

// Throws ValidationError on odd length or non-hex characters.
std::string from_hex(std::string_view hex);

// Printable ASCII rendering; every byte outside 0x20..0x7e becomes '.'.
std::string printable(std::string_view bytes);

std::string sha256_hex(std::string_view bytes);
inline std::string sha256_hex(ByteView bytes) { return sha256_hex(as_chars(bytes)); }

Bytes read_file(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

// %.17g: round-trips every double through text.
std::string format_real(double value);
// %.9g, for human-facing probability columns.
std::string format_real9(double value);

double parse_real(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char sep);
// The pieces would dangle.
std::vector<std::string_view> split(std::string&& text, char sep) = delete;
std::string_view trim(std::string_view text);

}  // namespace bytegram
