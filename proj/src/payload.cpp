#include "wordsig/payload.hpp"

#include "wordsig/error.hpp"

namespace wordsig {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedPayload, what); }

}  // namespace

std::string encode_segment_payload(std::string_view words, const Signature& prev_signature) {
  if (words.size() > kMaxWordsBytes)
    throw Error(ErrorCode::PayloadTooLarge, "segment words exceed " + std::to_string(kMaxWordsBytes) + " bytes");
  if (!is_valid_utf8(words)) malformed("segment words are not valid UTF-8");
  std::string out(words);
  out += kSegmentSeparator;
  out += base64url_encode(prev_signature.bytes);
  return out;
}

SegmentPayload decode_segment_payload(std::string_view text) {
  const auto split = text.rfind(kSegmentSeparator);
  if (split == std::string_view::npos) malformed("segment payload has no \"::\" separator");
  std::string_view tail = text.substr(split + kSegmentSeparator.size());
  if (tail.size() != kSignatureTextLength) malformed("signature tail must be 86 base64url characters");
  Bytes sig;
  try {
    sig = base64url_decode(tail);
  } catch (const Error&) {
    malformed("signature tail is not canonical base64url");
  }
  std::string_view words = text.substr(0, split);
  if (words.size() > kMaxWordsBytes) malformed("segment words exceed the size cap");
  if (!is_valid_utf8(words)) malformed("segment words are not valid UTF-8");
  return {std::string(words), Signature::from_bytes(sig)};
}

std::string encode_cert_payload(const Certificate& cert) {
  std::string out(kCertPayloadPrefix);
  out += base64url_encode(serialize_certificate(cert));
  return out;
}

Certificate decode_cert_payload(std::string_view text) {
  if (!text.starts_with(kCertPayloadPrefix)) {
    // "WSIG<digits>:CERT:" from some other protocol revision.
    if (text.starts_with("WSIG")) {
      auto colon = text.find(':');
      bool digits = colon != std::string_view::npos && colon > 4;
      for (std::size_t i = 4; digits && i < colon; ++i) digits = std::isdigit(static_cast<unsigned char>(text[i])) != 0;
      if (digits && text.substr(colon).starts_with(":CERT:"))
        throw Error(ErrorCode::UnsupportedVersion, "unsupported certificate payload version");
    }
    malformed("certificate payload prefix missing");
  }
  Bytes raw;
  try {
    raw = base64url_decode(text.substr(kCertPayloadPrefix.size()));
  } catch (const Error&) {
    malformed("certificate payload is not canonical base64url");
  }
  try {
    return parse_certificate(raw);
  } catch (const Error& e) {
    malformed(std::string("certificate payload: ") + e.what());
  }
}

}  // namespace wordsig
