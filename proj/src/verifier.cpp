#include "wordsig/verifier.hpp"

#include <ctime>
#include <json.hpp>
#include <sstream>

#include "wordsig/error.hpp"
#include "wordsig/io.hpp"
#include "wordsig/payload.hpp"
#include "wordsig/qr.hpp"
#include "wordsig/signer.hpp"

namespace wordsig {

namespace vt = verdict_text;

std::string_view to_string(VerdictCode code) {
  switch (code) {
    case VerdictCode::FakeNameMismatch: return "FakeNameMismatch";
    case VerdictCode::FakeCertSignature: return "FakeCertSignature";
    case VerdictCode::PossiblyFakeRevoked: return "PossiblyFakeRevoked";
    case VerdictCode::PossiblyFakeUntrusted: return "PossiblyFakeUntrusted";
    case VerdictCode::PossiblyFakeCertChanged: return "PossiblyFakeCertChanged";
    case VerdictCode::FakeTextMismatch: return "FakeTextMismatch";
    case VerdictCode::FakeSignature: return "FakeSignature";
    case VerdictCode::Unterminated: return "Unterminated";
    case VerdictCode::Verified: return "Verified";
    case VerdictCode::MalformedStream: return "MalformedStream";
  }
  return "Unknown";
}

int exit_code(VerdictCode code) {
  switch (code) {
    case VerdictCode::Verified: return 0;
    case VerdictCode::Unterminated: return 1;
    case VerdictCode::PossiblyFakeRevoked:
    case VerdictCode::PossiblyFakeUntrusted:
    case VerdictCode::PossiblyFakeCertChanged: return 2;
    case VerdictCode::FakeNameMismatch:
    case VerdictCode::FakeCertSignature:
    case VerdictCode::FakeTextMismatch:
    case VerdictCode::FakeSignature: return 3;
    case VerdictCode::MalformedStream: return 4;
  }
  return 4;
}

std::string_view to_string(TrustQuestionKind kind) {
  return kind == TrustQuestionKind::FirstTrust ? "first-trust" : "cert-changed";
}

std::string_view to_string(SessionState state) {
  switch (state) {
    case SessionState::AwaitCert: return "await-cert";
    case SessionState::AwaitTrust: return "await-trust";
    case SessionState::CertAccepted: return "cert-accepted";
    case SessionState::Streaming: return "streaming";
    case SessionState::Done: return "done";
  }
  return "unknown";
}

bool Verdict::is_fake() const {
  switch (code) {
    case VerdictCode::FakeNameMismatch:
    case VerdictCode::FakeCertSignature:
    case VerdictCode::FakeTextMismatch:
    case VerdictCode::FakeSignature: return true;
    default: return false;
  }
}

bool Verdict::is_possibly_fake() const {
  return code == VerdictCode::PossiblyFakeRevoked || code == VerdictCode::PossiblyFakeUntrusted ||
         code == VerdictCode::PossiblyFakeCertChanged;
}

Verdict Verdict::name_mismatch() { return {VerdictCode::FakeNameMismatch, std::string(vt::kNameMismatch), 0, {}}; }

Verdict Verdict::cert_signature() { return {VerdictCode::FakeCertSignature, std::string(vt::kCertSignature), 0, {}}; }

Verdict Verdict::revoked(std::uint64_t revoked_at) {
  return {VerdictCode::PossiblyFakeRevoked, std::string(vt::kRevokedPrefix) + format_utc(revoked_at), 0, revoked_at};
}

Verdict Verdict::untrusted() { return {VerdictCode::PossiblyFakeUntrusted, std::string(vt::kUntrusted), 0, {}}; }

Verdict Verdict::cert_changed(std::string_view name) {
  std::string msg(vt::kCertChangedPrefix);
  msg += name;
  msg += vt::kCertChangedSuffix;
  return {VerdictCode::PossiblyFakeCertChanged, std::move(msg), 0, {}};
}

Verdict Verdict::text_mismatch(std::uint64_t frame_index) {
  return {VerdictCode::FakeTextMismatch, std::string(vt::kTextMismatch), frame_index, {}};
}

Verdict Verdict::bad_signature(std::uint64_t signature_index) {
  std::string msg(vt::kSignaturePrefix);
  msg += std::to_string(signature_index);
  msg += vt::kSignatureSuffix;
  return {VerdictCode::FakeSignature, std::move(msg), signature_index, {}};
}

Verdict Verdict::unterminated() { return {VerdictCode::Unterminated, std::string(vt::kUnterminated), {}, {}}; }

Verdict Verdict::verified() { return {VerdictCode::Verified, std::string(vt::kVerified), {}, {}}; }

Verdict Verdict::malformed(std::uint64_t frame_index, std::string_view detail) {
  std::string msg = "Malformed stream: frame " + std::to_string(frame_index) + " could not be decoded (";
  msg += detail;
  msg += ")";
  return {VerdictCode::MalformedStream, std::move(msg), frame_index, {}};
}

std::string format_utc(std::uint64_t unix_seconds) {
  std::time_t t = static_cast<std::time_t>(unix_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

VerifySession::VerifySession(TrustStore trusted, RevokedDb revoked)
    : trusted_(std::move(trusted)), revoked_(std::move(revoked)) {}

SessionStatus VerifySession::done(Verdict v) {
  log_event(next_index_, false, v.message);
  verdict_ = std::move(v);
  question_.reset();
  state_ = SessionState::Done;
  return SessionStatus::Done;
}

void VerifySession::log_event(std::uint64_t index, bool ok, std::string message) {
  log_.push_back({index, ok, std::move(message)});
}

SessionStatus VerifySession::offer_certificate(const FrameInput& frame) {
  if (state_ == SessionState::Done) return SessionStatus::Done;
  if (state_ != SessionState::AwaitCert) throw Error(ErrorCode::SessionMisuse, "certificate frame already offered");
  if (frame.index != 0) throw Error(ErrorCode::SessionMisuse, "the first frame must have index 0");

  Certificate cert;
  try {
    cert = decode_cert_payload(frame.payload_text);
  } catch (const Error& e) {
    return done(Verdict::malformed(0, e.what()));
  }

  std::string text_name;
  try {
    text_name = extract_name(frame.caption);
  } catch (const Error&) {
    return done(Verdict::name_mismatch());
  }
  if (text_name != extract_name(cert)) return done(Verdict::name_mismatch());
  if (!verify_certificate(cert)) return done(Verdict::cert_signature());
  if (auto when = revoked_.is_revoked(cert)) return done(Verdict::revoked(*when));

  cert_ = cert;
  last_caption_ = frame.caption;
  next_index_ = 1;

  const Certificate* latest = trusted_.latest_trusted_for(cert.name);
  const bool pinned_elsewhere = latest != nullptr && !same_identity(*latest, cert);
  if (trusted_.contains(cert) && !pinned_elsewhere) {
    log_event(0, true, "Certificate for " + cert.name + " is already trusted.");
    state_ = SessionState::CertAccepted;
    return SessionStatus::Ok;
  }

  TrustQuestion q;
  q.name = text_name;
  if (pinned_elsewhere) {
    q.kind = TrustQuestionKind::CertChanged;
    q.display.push_back(std::string(vt::kCertChangedPrefix) + cert.name + ";");
    q.display.push_back("Possibly fake signature stream.");
  } else {
    q.kind = TrustQuestionKind::FirstTrust;
  }
  q.display.push_back(std::string(vt::kQuestionPrefix) + text_name + "?");
  question_ = std::move(q);
  state_ = SessionState::AwaitTrust;
  return SessionStatus::QuestionPending;
}

SessionStatus VerifySession::answer(bool accept) {
  if (state_ != SessionState::AwaitTrust || !question_)
    throw Error(ErrorCode::SessionMisuse, "no trust question is pending");
  const TrustQuestion q = *question_;
  question_.reset();
  if (!accept) {
    return done(q.kind == TrustQuestionKind::FirstTrust ? Verdict::untrusted() : Verdict::cert_changed(q.name));
  }
  accepted_.push_back(*cert_);
  trusted_.append_trusted(*cert_, 0);
  log_event(0, true, "Viewer trusts the certificate for " + cert_->name + ".");
  state_ = SessionState::CertAccepted;
  return SessionStatus::Ok;
}

SessionStatus VerifySession::feed(const FrameInput& frame) {
  if (state_ == SessionState::Done) return SessionStatus::Done;
  if (state_ != SessionState::CertAccepted && state_ != SessionState::Streaming)
    throw Error(ErrorCode::SessionMisuse, "segment frame fed before the certificate was accepted");
  if (frame.index != next_index_)
    throw Error(ErrorCode::SessionMisuse,
                "expected frame " + std::to_string(next_index_) + ", got " + std::to_string(frame.index));

  SegmentPayload payload;
  try {
    payload = decode_segment_payload(frame.payload_text);
  } catch (const Error& e) {
    return done(Verdict::malformed(frame.index, e.what()));
  }
  if (payload.words != frame.caption) return done(Verdict::text_mismatch(frame.index));
  if (!verify(as_bytes(last_caption_), payload.prev_signature, cert_->public_point))
    return done(Verdict::bad_signature(frame.index - 1));

  log_event(frame.index, true, std::string(vt::kProgress));
  last_caption_ = frame.caption;
  last_words_empty_ = payload.words.empty();
  ++next_index_;
  state_ = SessionState::Streaming;
  return SessionStatus::Ok;
}

const Verdict& VerifySession::finish() {
  if (state_ == SessionState::Done) return *verdict_;
  if (state_ == SessionState::AwaitCert) {
    done(Verdict::malformed(0, "stream has no certificate frame"));
  } else if (state_ == SessionState::AwaitTrust) {
    throw Error(ErrorCode::SessionMisuse, "a trust question is still pending");
  } else if (state_ == SessionState::Streaming && last_words_empty_) {
    verdict_ = Verdict::verified();
    log_event(next_index_ - 1, true, verdict_->message);
    state_ = SessionState::Done;
  } else {
    verdict_ = Verdict::unterminated();
    log_event(next_index_ - 1, true, verdict_->message);
    state_ = SessionState::Done;
  }
  return *verdict_;
}

SessionStatus VerifySession::fail(std::uint64_t index, std::string_view detail) {
  if (state_ == SessionState::Done) return SessionStatus::Done;
  return done(Verdict::malformed(index, detail));
}

void VerifySession::commit_trust(TrustStore& store, std::uint64_t now) const {
  if (state_ != SessionState::Done) throw Error(ErrorCode::SessionMisuse, "session has not finished");
  for (const auto& c : accepted_) store.append_trusted(c, now);
}

VerifySession begin(const FrameInput& frame0, const TrustStore& trusted, const RevokedDb& revoked,
                    TrustOracle& oracle) {
  VerifySession session(trusted, revoked);
  if (session.offer_certificate(frame0) == SessionStatus::QuestionPending)
    session.answer(oracle.ask(*session.pending_question()));
  return session;
}

VerifyResult verify_frames(const std::vector<FrameInput>& frames, const TrustStore& trusted,
                           const RevokedDb& revoked, TrustOracle& oracle) {
  if (frames.empty()) {
    VerifySession session(trusted, revoked);
    session.finish();
    return {*session.verdict(), session.log(), {}};
  }
  VerifySession session = begin(frames.front(), trusted, revoked, oracle);
  for (std::size_t i = 1; i < frames.size() && session.state() != SessionState::Done; ++i) session.feed(frames[i]);
  const Verdict& v = session.finish();
  return {v, session.log(), session.accepted()};
}

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& stream_dir) {
  std::istringstream in(read_text_file(stream_dir / kManifestName));
  std::vector<ManifestRecord> records;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      ManifestRecord r;
      r.index = j.at("index").get<std::uint64_t>();
      r.caption = j.at("caption").get<std::string>();
      if (j.contains("payload_text") && !j["payload_text"].is_null())
        r.payload_text = j["payload_text"].get<std::string>();
      if (j.contains("png_file") && !j["png_file"].is_null()) r.png_file = j["png_file"].get<std::string>();
      if (!r.payload_text && !r.png_file)
        throw Error(ErrorCode::MalformedInput, "record has neither payload_text nor png_file");
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedInput, "stream.jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

VerifyResult verify_stream(const std::filesystem::path& stream_dir, TrustStore& trusted, const RevokedDb& revoked,
                           TrustOracle& oracle, std::uint64_t now) {
  const auto records = read_manifest(stream_dir);
  VerifySession session(trusted, revoked);

  for (std::size_t i = 0; i < records.size() && session.state() != SessionState::Done; ++i) {
    const auto& r = records[i];
    FrameInput frame{r.index, {}, r.caption};
    if (r.index != i) {
      session.fail(i, "frame index out of order");
      break;
    }
    if (r.payload_text) {
      frame.payload_text = *r.payload_text;
    } else {
      try {
        frame.payload_text = qr_decode_png(read_file(stream_dir / *r.png_file));
      } catch (const Error& e) {
        session.fail(i, e.what());
        break;
      }
    }
    if (i == 0) {
      if (session.offer_certificate(frame) == SessionStatus::QuestionPending)
        session.answer(oracle.ask(*session.pending_question()));
    } else {
      session.feed(frame);
    }
  }

  const Verdict& v = session.finish();
  session.commit_trust(trusted, now);
  return {v, session.log(), session.accepted()};
}

}  // namespace wordsig
