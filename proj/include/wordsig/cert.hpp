#pragma once

// Self-signed name certificates and self-signed revocation records.
//
// Certificate wire layout (all integers big-endian):
//   "WSIG1-CERT" | version u8 | name_len u16 | name | public key (33)
//   | issued_at u64                                   <- canonical bytes
//   | self signature (64) | endorsement count u16
//   | endorsements: endorser fingerprint (32) | signature (64)
//
// Revocation record layout:
//   cert fingerprint (32) | revoked_at u64 | signature (64)
// where the signature covers "WSIG1-REVOKE" | fingerprint | revoked_at.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wordsig/crypto.hpp"

namespace wordsig {

inline constexpr std::uint8_t kCertVersion = 1;
inline constexpr std::size_t kMaxNameBytes = 64;
inline constexpr std::size_t kRevocationRecordSize = 32 + 8 + 64;

struct Endorsement {
  Fingerprint endorser;
  Signature signature;
  bool operator==(const Endorsement&) const = default;
};

struct Certificate {
  std::uint8_t version = kCertVersion;
  std::string name;
  PublicKey public_point{};
  std::uint64_t issued_at = 0;
  Signature self_signature;
  std::vector<Endorsement> endorsements;

  bool operator==(const Certificate&) const = default;
};

// Identity of a certificate for trust decisions; endorsements are ignored.
bool same_identity(const Certificate& a, const Certificate& b);

struct RevocationRecord {
  Fingerprint cert_fingerprint;
  std::uint64_t revoked_at = 0;
  Signature signature;

  bool operator==(const RevocationRecord&) const = default;
};

// 1..64 bytes of UTF-8, no control characters, no "::".
bool is_valid_name(std::string_view name);
void check_name(std::string_view name);

Bytes canonical_bytes(std::uint8_t version, std::string_view name, const PublicKey& public_point,
                      std::uint64_t issued_at);
Bytes canonical_bytes(const Certificate& cert);

Certificate create_certificate(std::string_view name, const KeyPair& key, std::uint64_t issued_at);
bool verify_certificate(const Certificate& cert) noexcept;

Certificate endorse_certificate(const Certificate& cert, const KeyPair& endorser);
bool verify_endorsement(const Certificate& cert, const Endorsement& endorsement, const PublicKey& endorser_key);

std::string extract_name(const Certificate& cert);
// Parses "[" name "'s public key certificate]"; throws Error(MalformedCaption).
std::string extract_name(std::string_view caption);
std::string certificate_caption(std::string_view name);

Bytes serialize_certificate(const Certificate& cert);
// Exact inverse of serialize_certificate; trailing bytes are an error.
Certificate parse_certificate(ByteView bytes);

Bytes revocation_message(const Fingerprint& fp, std::uint64_t revoked_at);
RevocationRecord create_revocation(const KeyPair& key, const Certificate& cert, std::uint64_t revoked_at);
bool verify_revocation(const RevocationRecord& record, const Certificate& cert) noexcept;

Bytes serialize_revocation(const RevocationRecord& record);
RevocationRecord parse_revocation(ByteView bytes);

// File helpers for .wsigcert / .wsigrev. Files are written as base64url text;
// reading accepts either that text form or the raw binary layout.
void write_certificate_file(const std::string& path, const Certificate& cert);
Certificate read_certificate_file(const std::string& path);
void write_revocation_file(const std::string& path, const RevocationRecord& record);
RevocationRecord read_revocation_file(const std::string& path);

// Private keys are stored as the raw 32-byte scalar, mode 0600. Reading also
// accepts 64 hex digits. Throws Error(Io) or Error(MalformedInput).
void write_key_file(const std::string& path, const KeyPair& key);
KeyPair read_key_file(const std::string& path);

}  // namespace wordsig
