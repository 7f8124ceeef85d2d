#pragma once

// Reed-Solomon over GF(256) with the QR field polynomial x^8+x^4+x^3+x^2+1 and
// generator roots alpha^0 .. alpha^(ecc-1).

#include <cstdint>
#include <span>
#include <vector>

namespace wordsig::rs {

std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) noexcept;
std::uint8_t gf_pow2(int exponent) noexcept;  // alpha^exponent
std::uint8_t gf_inv(std::uint8_t a);

// Returns `ecc_len` check bytes for `data`.
std::vector<std::uint8_t> encode(std::span<const std::uint8_t> data, int ecc_len);

// Corrects `block` (data followed by ecc_len check bytes) in place.
// Returns the number of corrected bytes, or -1 if the block is uncorrectable.
int decode(std::span<std::uint8_t> block, int ecc_len);

}  // namespace wordsig::rs
