#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "wordsig/error.hpp"
#include "wordsig/payload.hpp"

using namespace wordsig;
namespace ov = wordsig::oracle;

namespace {
ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::Io;
}
}  // namespace

TEST(Base64Url, RoundTripAndStrictness) {
  std::mt19937_64 rng(3);
  for (std::size_t n = 0; n < 70; ++n) {
    Bytes b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    std::string t = base64url_encode(b);
    EXPECT_EQ(t.find('='), std::string::npos);
    EXPECT_EQ(base64url_decode(t), b);
  }
  EXPECT_EQ(base64url_encode(as_bytes("\xfb\xff")), "-_8");
  EXPECT_THROW(base64url_decode("-_8="), Error);
  EXPECT_THROW(base64url_decode("+/8"), Error);
  EXPECT_THROW(base64url_decode("A"), Error);
  // Non-zero trailing bits have no canonical encoding.
  EXPECT_THROW(base64url_decode("-_9"), Error);
}

TEST(Payload, SegmentMatchesReferenceText) {
  Signature s = Signature::from_bytes(from_hex(ov::kStreamSignaturesHex[0]));
  std::string text = encode_segment_payload("we are", s);
  EXPECT_EQ(text, "we are::" + std::string(ov::kStreamSignaturesB64[0]));
  auto p = decode_segment_payload(text);
  EXPECT_EQ(p.words, "we are");
  EXPECT_EQ(p.prev_signature, s);
}

TEST(Payload, SplitsAtLastSeparator) {
  Signature s = Signature::from_bytes(from_hex(ov::kStreamSignaturesHex[1]));
  for (std::string words : {"", "a::b", "::", "ends with::", "x:"}) {
    auto p = decode_segment_payload(encode_segment_payload(words, s));
    EXPECT_EQ(p.words, words);
    EXPECT_EQ(p.prev_signature, s);
  }
}

TEST(Payload, WordLimit) {
  Signature s;
  EXPECT_NO_THROW(encode_segment_payload(std::string(kMaxWordsBytes, 'a'), s));
  EXPECT_EQ(code_of([&] { encode_segment_payload(std::string(kMaxWordsBytes + 1, 'a'), s); }),
            ErrorCode::PayloadTooLarge);
  EXPECT_EQ(code_of([&] { encode_segment_payload("\xc3", s); }), ErrorCode::MalformedPayload);
}

TEST(Payload, MalformedSegments) {
  const std::string sig(ov::kStreamSignaturesB64[0]);
  for (std::string bad : {std::string("no separator"), "words:" + sig, "words::" + sig.substr(1),
                          "words::" + sig + "A", "words::" + sig.substr(0, 85) + "=", "words::" + sig.substr(0, 85) + "+"}) {
    EXPECT_EQ(code_of([&] { decode_segment_payload(bad); }), ErrorCode::MalformedPayload) << bad;
  }
}

TEST(Payload, CertificateFrame) {
  Certificate c = endorse_certificate(test::jane_cert(), test::seeded_key(4));
  std::string text = encode_cert_payload(c);
  EXPECT_EQ(text.rfind(kCertPayloadPrefix, 0), 0u);
  EXPECT_EQ(decode_cert_payload(text), c);

  EXPECT_EQ(code_of([&] { decode_cert_payload("WSIG2:CERT:" + text.substr(11)); }), ErrorCode::UnsupportedVersion);
  EXPECT_EQ(code_of([&] { decode_cert_payload("WSIG1:CERT:"); }), ErrorCode::MalformedPayload);
  EXPECT_EQ(code_of([&] { decode_cert_payload("hello"); }), ErrorCode::MalformedPayload);
  EXPECT_EQ(code_of([&] { decode_cert_payload(text + "A"); }), ErrorCode::MalformedPayload);
}
