#pragma once

// ECDSA over secp256k1 with SHA-256 digests and RFC 6979 nonces.
//
// Byte conventions used by every other module:
//   private scalar   32 bytes, big-endian, in [1, n-1]
//   public key       33 bytes, compressed SEC1
//   signature        64 bytes, r || s, big-endian, s <= (n-1)/2
//   fingerprint      SHA-256 of the compressed public key

#include <array>
#include <compare>
#include <cstdint>
#include <optional>

#include "wordsig/bytes.hpp"

namespace wordsig {

using PublicKey = std::array<std::uint8_t, 33>;
using Digest = std::array<std::uint8_t, 32>;

struct Signature {
  std::array<std::uint8_t, 64> bytes{};

  static Signature from_bytes(ByteView b);
  ByteView view() const { return bytes; }
  auto operator<=>(const Signature&) const = default;
};

struct Fingerprint {
  Digest digest{};

  std::string hex() const { return to_hex(digest); }
  auto operator<=>(const Fingerprint&) const = default;
};

class KeyPair {
 public:
  // Throws Error(MalformedInput) unless 1 <= scalar < n.
  static KeyPair from_private(ByteView scalar);

  const std::array<std::uint8_t, 32>& private_scalar() const { return private_; }
  const PublicKey& public_point() const { return public_; }

 private:
  KeyPair() = default;
  std::array<std::uint8_t, 32> private_{};
  PublicKey public_{};
};

Digest sha256(ByteView data);

// With entropy the derivation is deterministic: the 32 bytes are read as a
// big-endian integer and reduced mod n; a zero result re-hashes the entropy
// with SHA-256 and tries again. Without entropy, 32 bytes come from the OS RNG.
KeyPair generate_keypair(std::optional<std::array<std::uint8_t, 32>> entropy = std::nullopt);

Signature sign(ByteView message, const KeyPair& key);

// Never throws: malformed points, out-of-range or high-s signatures are false.
bool verify(ByteView message, const Signature& sig, ByteView public_point);

// Throws Error(MalformedInput) unless public_point is 33 bytes.
Fingerprint fingerprint(ByteView public_point);

// Curve membership check on a compressed encoding.
bool is_valid_public_point(ByteView public_point);

}  // namespace wordsig
