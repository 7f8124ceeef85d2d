#pragma once

// Text grammar carried inside each QR code.
//
//   certificate frame:  "WSIG1:CERT:" base64url(serialized certificate)
//   segment frame:      words "::" base64url(previous signature)
//
// base64url has no ':' so a segment payload splits at its last "::", and the
// signature tail is always exactly 86 characters.

#include <string>
#include <string_view>

#include "wordsig/cert.hpp"
#include "wordsig/crypto.hpp"

namespace wordsig {

inline constexpr std::size_t kMaxWordsBytes = 400;
inline constexpr std::size_t kSignatureTextLength = 86;
inline constexpr std::string_view kCertPayloadPrefix = "WSIG1:CERT:";
inline constexpr std::string_view kSegmentSeparator = "::";

struct SegmentPayload {
  std::string words;
  Signature prev_signature;

  bool operator==(const SegmentPayload&) const = default;
};

// Throws Error(PayloadTooLarge) when words exceed kMaxWordsBytes and
// Error(MalformedPayload) when they are not valid UTF-8.
std::string encode_segment_payload(std::string_view words, const Signature& prev_signature);
SegmentPayload decode_segment_payload(std::string_view text);

std::string encode_cert_payload(const Certificate& cert);
// Throws Error(UnsupportedVersion) for a "WSIGn:CERT:" prefix with n != 1 and
// Error(MalformedPayload) otherwise.
Certificate decode_cert_payload(std::string_view text);

}  // namespace wordsig
