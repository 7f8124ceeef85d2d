#pragma once

// QR Model 2 codes in byte mode: encoding, decoding with error correction,
// and PNG rasters.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wordsig/bytes.hpp"

namespace wordsig {

enum class EcLevel { L, M, Q, H };

char to_char(EcLevel level);

class QrMatrix {
 public:
  QrMatrix() = default;
  QrMatrix(int version, EcLevel ec_level);

  int version() const { return version_; }
  EcLevel ec_level() const { return ec_level_; }
  int side() const { return side_; }

  // true = dark module
  bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * side_ + x] != 0; }
  void set(int x, int y, bool dark) { bits_[static_cast<std::size_t>(y) * side_ + x] = dark ? 1 : 0; }
  void flip(int x, int y) { set(x, y, !at(x, y)); }

  bool operator==(const QrMatrix&) const = default;

 private:
  int version_ = 0;
  EcLevel ec_level_ = EcLevel::M;
  int side_ = 0;
  std::vector<std::uint8_t> bits_;
};

namespace qr {

inline constexpr int kMinVersion = 1;
inline constexpr int kMaxVersion = 40;

constexpr int side_for_version(int version) { return 17 + 4 * version; }

// Byte-mode capacity in bytes of the given symbol.
int byte_capacity(int version, EcLevel level);
int ecc_codewords_per_block(int version, EcLevel level);
int num_blocks(int version, EcLevel level);

// Modules reserved for finder, timing, alignment, format and version
// information; everything else carries codewords or remainder bits.
std::vector<std::vector<bool>> function_pattern_mask(int version);

// Level stored in the format information; throws Error(DecodeFailure).
EcLevel read_ec_level(const QrMatrix& matrix);

}  // namespace qr

// Picks the smallest version that holds `text` at `ec_level`.
// Throws Error(PayloadTooLarge) beyond version 40.
QrMatrix qr_encode(std::string_view text, EcLevel ec_level = EcLevel::M);

// Throws Error(DecodeFailure) when the symbol cannot be read or corrected.
std::string qr_decode(const QrMatrix& matrix);

// Dark modules are black, quiet zone and light modules white. 1-bit grayscale.
Bytes render_png(const QrMatrix& matrix, int module_pixels, int quiet_zone = 4);

// Accepts axis-aligned, undistorted rasters laid out like render_png output.
// Throws Error(DecodeFailure) for unreadable PNG data or missing finder patterns.
QrMatrix read_png(ByteView png);

inline std::string qr_decode_png(ByteView png) { return qr_decode(read_png(png)); }

}  // namespace wordsig
