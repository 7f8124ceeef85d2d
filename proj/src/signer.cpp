#include "wordsig/signer.hpp"

#include <cstdio>
#include <json.hpp>

#include "wordsig/error.hpp"
#include "wordsig/io.hpp"
#include "wordsig/payload.hpp"

namespace wordsig {

namespace {

[[noreturn]] void bad_input(const std::string& what) { throw Error(ErrorCode::MalformedInput, what); }

bool has_whitespace(std::string_view s) {
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c))) return true;
  return false;
}

}  // namespace

std::vector<Segment> segment_transcript(const std::vector<TimedWord>& words, std::uint32_t seg_ms) {
  if (seg_ms == 0) bad_input("segment length must be at least 1 ms");
  std::vector<Segment> segments;
  std::uint64_t prev_start = 0;
  for (const auto& w : words) {
    if (w.text.empty()) bad_input("transcript word is empty");
    if (has_whitespace(w.text)) bad_input("transcript word contains whitespace: \"" + w.text + "\"");
    if (w.start_ms < prev_start) bad_input("transcript is not sorted by start_ms");
    prev_start = w.start_ms;

    const std::uint64_t window = w.start_ms / seg_ms + 1;
    while (segments.size() < window) segments.push_back({segments.size() + 1, {}});
    std::string& text = segments.back().words;
    if (!text.empty()) text.push_back(' ');
    text += w.text;
  }
  return segments;
}

StreamSigner::StreamSigner(Certificate cert, KeyPair key) : cert_(std::move(cert)), key_(std::move(key)) {
  if (!verify_certificate(cert_)) throw Error(ErrorCode::InvalidCertificate, "certificate self-signature is invalid");
  if (key_.public_point() != cert_.public_point)
    throw Error(ErrorCode::KeyMismatch, "private key does not match the certificate");
  last_caption_ = certificate_caption(cert_.name);
}

Frame StreamSigner::make_frame(std::uint64_t index, std::string payload, std::string caption) const {
  Frame f;
  f.index = index;
  f.qr = qr_encode(payload);
  f.payload_text = std::move(payload);
  f.caption = std::move(caption);
  return f;
}

Frame StreamSigner::certificate_frame() const {
  return make_frame(0, encode_cert_payload(cert_), certificate_caption(cert_.name));
}

Frame StreamSigner::next(std::string_view words) {
  if (closed_) throw Error(ErrorCode::SessionMisuse, "stream already terminated");
  std::string payload = encode_segment_payload(words, sign(as_bytes(last_caption_), key_));
  Frame f = make_frame(next_index_, std::move(payload), std::string(words));
  ++next_index_;
  last_caption_ = std::string(words);
  return f;
}

Frame StreamSigner::terminate() {
  Frame f = next("");
  closed_ = true;
  return f;
}

std::vector<Frame> sign_stream(const std::vector<Segment>& segments, const Certificate& cert, const KeyPair& key,
                               const SignOptions& options) {
  StreamSigner signer(cert, key);
  std::vector<Frame> frames;
  frames.reserve(segments.size() + 2);
  frames.push_back(signer.certificate_frame());
  for (const auto& seg : segments) {
    if (seg.index != signer.next_index())
      bad_input("segments must be indexed consecutively from 1 (got " + std::to_string(seg.index) + ")");
    frames.push_back(signer.next(seg.words));
  }
  if (options.emit_terminal) frames.push_back(signer.terminate());
  if (options.ec_level != EcLevel::M)
    for (auto& f : frames) f.qr = qr_encode(f.payload_text, options.ec_level);
  if (options.png_scale > 0)
    for (auto& f : frames) f.png = render_png(f.qr, options.png_scale);
  return frames;
}

std::string frame_png_name(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05llu.png", static_cast<unsigned long long>(index));
  return buf;
}

void write_stream(const std::vector<Frame>& frames, const std::filesystem::path& directory, const StreamMeta& meta,
                  int png_scale) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + directory.string() + ": " + ec.message());

  std::string manifest;
  for (const auto& f : frames) {
    const std::string png_name = frame_png_name(f.index);
    if (f.png) {
      write_file_atomic(directory / png_name, *f.png);
    } else {
      write_file_atomic(directory / png_name, render_png(f.qr, png_scale));
    }
    nlohmann::ordered_json rec;
    rec["index"] = f.index;
    rec["payload_text"] = f.payload_text;
    rec["caption"] = f.caption;
    rec["png_file"] = png_name;
    manifest += rec.dump() + "\n";
  }

  nlohmann::ordered_json m;
  m["seg_ms"] = meta.seg_ms;
  m["created_at"] = meta.created_at;
  m["frames"] = frames.size();
  write_file_atomic(directory / kMetaName, m.dump() + "\n");
  write_file_atomic(directory / kManifestName, manifest);
}

std::vector<TimedWord> parse_transcript(std::string_view jsonl) {
  std::vector<TimedWord> words;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      TimedWord w;
      if (!j.at("start_ms").is_number_unsigned()) bad_input("start_ms must be a non-negative integer");
      w.start_ms = j.at("start_ms").get<std::uint64_t>();
      w.text = j.at("text").get<std::string>();
      words.push_back(std::move(w));
    } catch (const nlohmann::json::exception& e) {
      bad_input("transcript line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      bad_input("transcript line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return words;
}

std::vector<TimedWord> read_transcript(const std::filesystem::path& path) {
  return parse_transcript(read_text_file(path));
}

}  // namespace wordsig
