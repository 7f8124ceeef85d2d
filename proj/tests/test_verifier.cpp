#include <gtest/gtest.h>

#include "support.hpp"
#include "wordsig/error.hpp"
#include "wordsig/payload.hpp"

using namespace wordsig;

namespace {

struct Fixture {
  Certificate cert = test::jane_cert();
  KeyPair key = test::jane_key();
  std::vector<FrameInput> frames = test::to_inputs(test::five_frame_stream(cert, key));
  TrustStore trusted;
  RevokedDb revoked;

  VerifyResult run(bool accept) {
    FixedOracle oracle(accept);
    return verify_frames(frames, trusted, revoked, oracle);
  }
};

}  // namespace

TEST(Verdicts, ExactText) {
  EXPECT_EQ(Verdict::name_mismatch().message, "Fake: text name does not match certificate name");
  EXPECT_EQ(Verdict::cert_signature().message, "Fake: certificate signature does not match certificate name.");
  EXPECT_EQ(Verdict::revoked(1710000000).message,
            "Possibly fake: Certificate was revoked using its own private key on 2024-03-09T16:00:00Z");
  EXPECT_EQ(Verdict::untrusted().message, "Possibly fake: you do not trust the certificate source.");
  EXPECT_EQ(Verdict::cert_changed("JaneDoe123").message,
            "Certificate does not match latest trusted certificate for JaneDoe123; Possibly fake signature stream.");
  EXPECT_EQ(Verdict::text_mismatch(3).message, "Fake: QR code text content does not match displayed text content.");
  EXPECT_EQ(Verdict::bad_signature(2).message, "Fake: Signature 2 does not match words and certificate.");
  EXPECT_EQ(Verdict::verified().message, "Signature stream verified.");
  EXPECT_EQ(Verdict::unterminated().message, "Signature stream verified except final segment (unterminated).");
}

TEST(Verdicts, ExitCodes) {
  const std::pair<VerdictCode, int> table[] = {
      {VerdictCode::Verified, 0},
      {VerdictCode::Unterminated, 1},
      {VerdictCode::PossiblyFakeRevoked, 2},
      {VerdictCode::PossiblyFakeUntrusted, 2},
      {VerdictCode::PossiblyFakeCertChanged, 2},
      {VerdictCode::FakeNameMismatch, 3},
      {VerdictCode::FakeCertSignature, 3},
      {VerdictCode::FakeTextMismatch, 3},
      {VerdictCode::FakeSignature, 3},
      {VerdictCode::MalformedStream, 4},
  };
  for (auto [code, rc] : table) EXPECT_EQ(exit_code(code), rc) << to_string(code);
}

TEST(Verifier, GenuineStream) {
  Fixture f;
  auto r = f.run(true);
  EXPECT_EQ(r.verdict.code, VerdictCode::Verified);
  ASSERT_EQ(r.accepted.size(), 1u);
  int progress = 0;
  for (const auto& ev : r.log) progress += ev.message == verdict_text::kProgress;
  EXPECT_EQ(progress, 4);
}

TEST(Verifier, WithoutTerminalIsUnterminated) {
  Fixture f;
  f.frames.pop_back();
  EXPECT_EQ(f.run(true).verdict.code, VerdictCode::Unterminated);
  f.frames.resize(1);
  EXPECT_EQ(f.run(true).verdict.code, VerdictCode::Unterminated);
}

TEST(Verifier, EmptyStreamIsMalformed) {
  Fixture f;
  f.frames.clear();
  EXPECT_EQ(f.run(true).verdict.code, VerdictCode::MalformedStream);
}

TEST(Verifier, DeclinedFirstContact) {
  Fixture f;
  auto r = f.run(false);
  EXPECT_EQ(r.verdict.code, VerdictCode::PossiblyFakeUntrusted);
  EXPECT_TRUE(r.accepted.empty());
}

TEST(Verifier, PreTrustedSkipsQuestion) {
  Fixture f;
  f.trusted.append_trusted(f.cert, 1);
  FixedOracle oracle(false);
  auto r = verify_frames(f.frames, f.trusted, f.revoked, oracle);
  EXPECT_EQ(r.verdict.code, VerdictCode::Verified);
  EXPECT_EQ(oracle.calls(), 0);
}

TEST(Verifier, NameMismatch) {
  Fixture f;
  f.frames[0].caption = "[JohnDoe's public key certificate]";
  EXPECT_EQ(f.run(true).verdict.code, VerdictCode::FakeNameMismatch);
  f.frames[0].caption = "JaneDoe123";
  EXPECT_EQ(f.run(true).verdict.code, VerdictCode::FakeNameMismatch);
}

TEST(Verifier, ForgedCertificate) {
  Fixture f;
  Certificate forged = f.cert;
  forged.public_point = test::seeded_key(1).public_point();
  f.frames[0].payload_text = encode_cert_payload(forged);
  EXPECT_EQ(f.run(true).verdict.code, VerdictCode::FakeCertSignature);
}

TEST(Verifier, Revoked) {
  Fixture f;
  f.revoked.add(create_revocation(f.key, f.cert, 1710000000), f.cert);
  auto r = f.run(true);
  EXPECT_EQ(r.verdict.code, VerdictCode::PossiblyFakeRevoked);
  EXPECT_EQ(r.verdict.revoked_at, 1710000000u);
  EXPECT_NE(r.verdict.message.find("2024-03-09"), std::string::npos);
}

TEST(Verifier, CertChangedQuestion) {
  Fixture f;
  KeyPair old_key = test::seeded_key(77);
  f.trusted.append_trusted(create_certificate("JaneDoe123", old_key, 1600000000), 1);
  std::optional<TrustQuestion> seen;
  CallbackOracle decline([&](const TrustQuestion& q) {
    seen = q;
    return false;
  });
  auto r = verify_frames(f.frames, f.trusted, f.revoked, decline);
  ASSERT_TRUE(seen);
  EXPECT_EQ(seen->kind, TrustQuestionKind::CertChanged);
  EXPECT_EQ(seen->display.back(), "Do you trust that this content is from JaneDoe123?");
  EXPECT_EQ(r.verdict.code, VerdictCode::PossiblyFakeCertChanged);

  CallbackOracle accept([&](const TrustQuestion&) { return true; });
  EXPECT_EQ(verify_frames(f.frames, f.trusted, f.revoked, accept).verdict.code, VerdictCode::Verified);
}

TEST(Verifier, OlderTrustedCertAfterRotation) {
  // The store pins the newest certificate; an older one still asks.
  Fixture f;
  f.trusted.append_trusted(f.cert, 1);
  f.trusted.append_trusted(create_certificate("JaneDoe123", test::seeded_key(78), 1800000000), 2);
  FixedOracle oracle(false);
  auto r = verify_frames(f.frames, f.trusted, f.revoked, oracle);
  EXPECT_EQ(oracle.calls(), 1);
  EXPECT_EQ(r.verdict.code, VerdictCode::PossiblyFakeCertChanged);
}

TEST(Verifier, TextMismatch) {
  Fixture f;
  f.frames[2].caption = "not at peace";
  auto r = f.run(true);
  EXPECT_EQ(r.verdict.code, VerdictCode::FakeTextMismatch);
  EXPECT_EQ(r.verdict.frame_index, 2u);
}

TEST(Verifier, BrokenChain) {
  Fixture f;
  auto other = test::to_inputs(test::five_frame_stream(f.cert, f.key, {"we are", "at war", "with anyone"}));
  f.frames[3] = other[3];
  auto r = f.run(true);
  EXPECT_EQ(r.verdict.code, VerdictCode::FakeSignature);
  EXPECT_EQ(r.verdict.message, "Fake: Signature 2 does not match words and certificate.");
}

TEST(Verifier, MalformedSegment) {
  Fixture f;
  f.frames[1].payload_text = "no separator";
  EXPECT_EQ(f.run(true).verdict.code, VerdictCode::MalformedStream);
}

TEST(VerifySession, StateMachine) {
  Fixture f;
  VerifySession s(f.trusted, f.revoked);
  EXPECT_EQ(s.state(), SessionState::AwaitCert);
  EXPECT_THROW(s.feed(f.frames[1]), Error);
  EXPECT_THROW(s.offer_certificate(f.frames[1]), Error);
  EXPECT_EQ(s.offer_certificate(f.frames[0]), SessionStatus::QuestionPending);
  EXPECT_EQ(s.state(), SessionState::AwaitTrust);
  EXPECT_EQ(s.pending_question()->kind, TrustQuestionKind::FirstTrust);
  EXPECT_THROW(s.feed(f.frames[1]), Error);
  EXPECT_THROW(s.finish(), Error);
  EXPECT_EQ(s.answer(true), SessionStatus::Ok);
  EXPECT_THROW(s.answer(true), Error);
  EXPECT_EQ(s.state(), SessionState::CertAccepted);
  EXPECT_THROW(s.feed(f.frames[2]), Error);
  for (std::size_t i = 1; i < f.frames.size(); ++i) EXPECT_EQ(s.feed(f.frames[i]), SessionStatus::Ok);
  EXPECT_EQ(s.state(), SessionState::Streaming);
  EXPECT_EQ(s.finish().code, VerdictCode::Verified);
  EXPECT_EQ(s.finish().code, VerdictCode::Verified);
  EXPECT_EQ(s.feed(f.frames[1]), SessionStatus::Done);
}

TEST(VerifySession, TrustIsTransactional) {
  Fixture f;
  VerifySession s(f.trusted, f.revoked);
  s.offer_certificate(f.frames[0]);
  s.answer(true);
  TrustStore store;
  EXPECT_THROW(s.commit_trust(store, 5), Error);
  f.frames[2].caption = "tampered";
  s.feed(f.frames[1]);
  EXPECT_EQ(s.feed(f.frames[2]), SessionStatus::Done);
  s.commit_trust(store, 5);
  // The viewer's decision stands even though the stream turned out fake.
  ASSERT_EQ(store.entries().size(), 1u);
  EXPECT_EQ(store.entries()[0].added_at, 5u);
}
