#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wordsig {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline std::string to_string(ByteView b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

std::string to_hex(ByteView data);
// Throws Error(MalformedInput) on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

// RFC 4648 section 5 alphabet, never padded. Decoding is strict: padding
// characters, foreign characters and non-zero trailing bits are rejected, so
// every byte string has exactly one accepted text form.
std::string base64url_encode(ByteView data);
Bytes base64url_decode(std::string_view text);
bool is_base64url_char(char c) noexcept;

// Rejects overlong forms, surrogates and code points above U+10FFFF.
bool is_valid_utf8(std::string_view s) noexcept;

void put_be16(Bytes& out, std::uint16_t v);
void put_be64(Bytes& out, std::uint64_t v);
std::uint16_t get_be16(ByteView in);
std::uint64_t get_be64(ByteView in);

template <std::size_t N>
std::array<std::uint8_t, N> to_array(ByteView in) {
  std::array<std::uint8_t, N> out{};
  std::copy_n(in.begin(), N, out.begin());
  return out;
}

}  // namespace wordsig
