#pragma once

// Replays a frame stream and reports one of the verdicts below. Trust
// decisions go through a TrustOracle, or through answer() when the caller
// drives the session asynchronously (the HTTP service does this).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wordsig/cert.hpp"
#include "wordsig/trust_store.hpp"

namespace wordsig {

namespace verdict_text {
inline constexpr std::string_view kNameMismatch = "Fake: text name does not match certificate name";
inline constexpr std::string_view kCertSignature = "Fake: certificate signature does not match certificate name.";
inline constexpr std::string_view kRevokedPrefix =
    "Possibly fake: Certificate was revoked using its own private key on ";
inline constexpr std::string_view kUntrusted = "Possibly fake: you do not trust the certificate source.";
inline constexpr std::string_view kCertChangedPrefix = "Certificate does not match latest trusted certificate for ";
inline constexpr std::string_view kCertChangedSuffix = "; Possibly fake signature stream.";
inline constexpr std::string_view kTextMismatch =
    "Fake: QR code text content does not match displayed text content.";
inline constexpr std::string_view kSignaturePrefix = "Fake: Signature ";
inline constexpr std::string_view kSignatureSuffix = " does not match words and certificate.";
inline constexpr std::string_view kVerified = "Signature stream verified.";
inline constexpr std::string_view kUnterminated = "Signature stream verified except final segment (unterminated).";
inline constexpr std::string_view kProgress = "Signatures verified thus far...";
inline constexpr std::string_view kQuestionPrefix = "Do you trust that this content is from ";
}  // namespace verdict_text

enum class VerdictCode {
  FakeNameMismatch,
  FakeCertSignature,
  PossiblyFakeRevoked,
  PossiblyFakeUntrusted,
  PossiblyFakeCertChanged,
  FakeTextMismatch,
  FakeSignature,
  Unterminated,
  Verified,
  // A frame could not be decoded at all; not one of the authenticity verdicts.
  MalformedStream,
};

std::string_view to_string(VerdictCode code);

// Process exit status used by the CLI: 0 verified, 1 unterminated,
// 2 possibly fake, 3 fake, 4 malformed.
int exit_code(VerdictCode code);

struct Verdict {
  VerdictCode code = VerdictCode::Verified;
  std::string message;
  // Frame that triggered the verdict (FakeTextMismatch, MalformedStream) or
  // the signature number for FakeSignature.
  std::optional<std::uint64_t> frame_index;
  std::optional<std::uint64_t> revoked_at;

  bool is_fake() const;
  bool is_possibly_fake() const;

  static Verdict name_mismatch();
  static Verdict cert_signature();
  static Verdict revoked(std::uint64_t revoked_at);
  static Verdict untrusted();
  static Verdict cert_changed(std::string_view name);
  static Verdict text_mismatch(std::uint64_t frame_index);
  static Verdict bad_signature(std::uint64_t signature_index);
  static Verdict unterminated();
  static Verdict verified();
  static Verdict malformed(std::uint64_t frame_index, std::string_view detail);
};

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_utc(std::uint64_t unix_seconds);

enum class TrustQuestionKind { FirstTrust, CertChanged };

struct TrustQuestion {
  std::string name;
  TrustQuestionKind kind = TrustQuestionKind::FirstTrust;
  // Lines to show the viewer, ending with the question itself.
  std::vector<std::string> display;
};

std::string_view to_string(TrustQuestionKind kind);

class TrustOracle {
 public:
  virtual ~TrustOracle() = default;
  virtual bool ask(const TrustQuestion& question) = 0;
};

// Answers every question the same way.
class FixedOracle final : public TrustOracle {
 public:
  explicit FixedOracle(bool accept) : accept_(accept) {}
  bool ask(const TrustQuestion&) override {
    ++calls_;
    return accept_;
  }
  int calls() const { return calls_; }

 private:
  bool accept_;
  int calls_ = 0;
};

class CallbackOracle final : public TrustOracle {
 public:
  explicit CallbackOracle(std::function<bool(const TrustQuestion&)> fn) : fn_(std::move(fn)) {}
  bool ask(const TrustQuestion& q) override { return fn_(q); }

 private:
  std::function<bool(const TrustQuestion&)> fn_;
};

struct FrameInput {
  std::uint64_t index = 0;
  std::string payload_text;
  std::string caption;
};

struct FrameEvent {
  std::uint64_t index = 0;
  bool ok = false;
  std::string message;
};

enum class SessionState { AwaitCert, AwaitTrust, CertAccepted, Streaming, Done };
enum class SessionStatus { Ok, QuestionPending, Done };

std::string_view to_string(SessionState state);

class VerifySession {
 public:
  // The session works on a snapshot; trust decisions are only written back
  // by commit_trust().
  VerifySession(TrustStore trusted, RevokedDb revoked);

  SessionState state() const { return state_; }
  const std::optional<TrustQuestion>& pending_question() const { return question_; }
  const std::optional<Verdict>& verdict() const { return verdict_; }
  const std::vector<FrameEvent>& log() const { return log_; }
  const std::optional<Certificate>& certificate() const { return cert_; }
  std::uint64_t next_index() const { return next_index_; }

  // Frame 0. Throws Error(SessionMisuse) outside AwaitCert or for index != 0.
  SessionStatus offer_certificate(const FrameInput& frame);
  // Throws Error(SessionMisuse) when no question is pending.
  SessionStatus answer(bool accept);
  // Frames 1, 2, ... in order. Throws Error(SessionMisuse) for a wrong index
  // or while a question is pending; a finished session ignores further frames.
  SessionStatus feed(const FrameInput& frame);
  // Ends the session with MalformedStream, e.g. when a QR image is unreadable.
  SessionStatus fail(std::uint64_t index, std::string_view detail);
  // Idempotent.
  const Verdict& finish();

  // Certificates the viewer accepted during this session, in order.
  const std::vector<Certificate>& accepted() const { return accepted_; }
  // Appends accepted certificates to `store`; only valid once finished.
  void commit_trust(TrustStore& store, std::uint64_t now) const;

 private:
  SessionStatus done(Verdict v);
  void log_event(std::uint64_t index, bool ok, std::string message);

  TrustStore trusted_;
  RevokedDb revoked_;
  SessionState state_ = SessionState::AwaitCert;
  std::optional<Certificate> cert_;
  std::optional<TrustQuestion> question_;
  std::optional<Verdict> verdict_;
  std::vector<FrameEvent> log_;
  std::vector<Certificate> accepted_;
  std::string last_caption_;
  std::uint64_t next_index_ = 0;
  bool last_words_empty_ = false;
};

// Offers frame 0 and settles any trust question through the oracle.
VerifySession begin(const FrameInput& frame0, const TrustStore& trusted, const RevokedDb& revoked,
                    TrustOracle& oracle);

struct VerifyResult {
  Verdict verdict;
  std::vector<FrameEvent> log;
  std::vector<Certificate> accepted;
};

// begin + feed* + finish over in-memory frames; frames must be in index order.
VerifyResult verify_frames(const std::vector<FrameInput>& frames, const TrustStore& trusted,
                           const RevokedDb& revoked, TrustOracle& oracle);

struct ManifestRecord {
  std::uint64_t index = 0;
  std::optional<std::string> payload_text;
  std::string caption;
  std::optional<std::string> png_file;
};

// Throws Error(Io) or Error(MalformedInput).
std::vector<ManifestRecord> read_manifest(const std::filesystem::path& stream_dir);

// Reads stream.jsonl, decoding referenced PNGs when payload_text is absent.
// An undecodable frame ends the stream with a MalformedStream verdict.
// Accepted certificates are appended to `trusted` (not saved).
VerifyResult verify_stream(const std::filesystem::path& stream_dir, TrustStore& trusted, const RevokedDb& revoked,
                           TrustOracle& oracle, std::uint64_t now);

}  // namespace wordsig
