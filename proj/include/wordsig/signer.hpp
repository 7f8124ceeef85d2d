#pragma once

// Turns a timed transcript into a chained frame stream:
//
//   frame 0      certificate payload, caption "[<name>'s public key certificate]"
//   frame i>=1   words_i "::" sign(caption_{i-1})
//   terminal     "" "::" sign(caption_n), caption ""   (optional, on by default)

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wordsig/cert.hpp"
#include "wordsig/crypto.hpp"
#include "wordsig/qr.hpp"

namespace wordsig {

inline constexpr std::uint32_t kDefaultSegmentMs = 2000;

struct TimedWord {
  std::uint64_t start_ms = 0;
  std::string text;
};

struct Segment {
  std::uint64_t index = 0;  // >= 1
  std::string words;

  bool operator==(const Segment&) const = default;
};

struct Frame {
  std::uint64_t index = 0;
  std::string payload_text;
  std::string caption;
  QrMatrix qr;
  std::optional<Bytes> png;
};

// Segment i covers [(i-1)*seg_ms, i*seg_ms). Windows without words still
// produce a segment so that frame indices track time. Throws
// Error(MalformedInput) for unsorted input, empty words, whitespace in a word
// or seg_ms == 0.
std::vector<Segment> segment_transcript(const std::vector<TimedWord>& words,
                                        std::uint32_t seg_ms = kDefaultSegmentMs);

// Incremental chain builder; sign_stream and the signing service both use it,
// so the two produce identical payloads.
class StreamSigner {
 public:
  // Throws Error(InvalidCertificate) or Error(KeyMismatch).
  StreamSigner(Certificate cert, KeyPair key);

  const Certificate& certificate() const { return cert_; }
  std::uint64_t next_index() const { return next_index_; }
  const std::string& last_caption() const { return last_caption_; }
  bool closed() const { return closed_; }

  Frame certificate_frame() const;
  // Frame next_index() carrying `words`. Throws Error(PayloadTooLarge).
  Frame next(std::string_view words);
  // Empty-words frame signing the last caption; closes the chain.
  Frame terminate();

 private:
  Frame make_frame(std::uint64_t index, std::string payload, std::string caption) const;

  Certificate cert_;
  KeyPair key_;
  std::uint64_t next_index_ = 1;
  std::string last_caption_;
  bool closed_ = false;
};

struct SignOptions {
  bool emit_terminal = true;
  EcLevel ec_level = EcLevel::M;
  // 0 skips PNG rendering.
  int png_scale = 0;
};

std::vector<Frame> sign_stream(const std::vector<Segment>& segments, const Certificate& cert, const KeyPair& key,
                               const SignOptions& options = {});

struct StreamMeta {
  std::uint32_t seg_ms = kDefaultSegmentMs;
  std::uint64_t created_at = 0;
};

inline constexpr std::string_view kManifestName = "stream.jsonl";
inline constexpr std::string_view kMetaName = "stream.meta";

std::string frame_png_name(std::uint64_t index);

// Writes frame PNGs (rendering at `png_scale` where a frame has none), then
// stream.meta and finally stream.jsonl, each through a temp file + rename.
// Throws Error(Io).
void write_stream(const std::vector<Frame>& frames, const std::filesystem::path& directory, const StreamMeta& meta,
                  int png_scale = 8);

// JSON Lines, one {"start_ms": n, "text": "..."} object per line.
std::vector<TimedWord> parse_transcript(std::string_view jsonl);
std::vector<TimedWord> read_transcript(const std::filesystem::path& path);

}  // namespace wordsig
