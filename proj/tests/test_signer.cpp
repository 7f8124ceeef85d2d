#include <gtest/gtest.h>

#include <json.hpp>

#include "support.hpp"
#include "wordsig/error.hpp"
#include "wordsig/io.hpp"
#include "wordsig/payload.hpp"

using namespace wordsig;
namespace ov = wordsig::oracle;

TEST(Segmenter, GroupsByWindow) {
  std::vector<TimedWord> words = {{0, "we"}, {500, "are"}, {2100, "not"}, {2500, "at"}, {3000, "war"}, {6500, "ok"}};
  auto segs = segment_transcript(words);
  ASSERT_EQ(segs.size(), 4u);
  EXPECT_EQ(segs[0], (Segment{1, "we are"}));
  EXPECT_EQ(segs[1], (Segment{2, "not at war"}));
  EXPECT_EQ(segs[2], (Segment{3, ""}));
  EXPECT_EQ(segs[3], (Segment{4, "ok"}));
  EXPECT_TRUE(segment_transcript({}).empty());
  EXPECT_EQ(segment_transcript(words, 10000).size(), 1u);
}

TEST(Segmenter, RejectsBadInput) {
  EXPECT_THROW(segment_transcript({{100, "b"}, {50, "a"}}), Error);
  EXPECT_THROW(segment_transcript({{0, ""}}), Error);
  EXPECT_THROW(segment_transcript({{0, "two words"}}), Error);
  EXPECT_THROW(segment_transcript({{0, "a"}}, 0), Error);
}

TEST(Signer, MatchesReferenceChain) {
  auto frames = test::five_frame_stream(test::jane_cert(), test::jane_key());
  ASSERT_EQ(frames.size(), 5u);
  EXPECT_EQ(frames[0].caption, ov::kStreamCaptions[0]);
  EXPECT_EQ(frames[0].payload_text, encode_cert_payload(test::jane_cert()));
  for (std::size_t i = 1; i < 5; ++i) {
    EXPECT_EQ(frames[i].index, i);
    const std::string words = i < 4 ? std::string(ov::kStreamCaptions[i]) : "";
    EXPECT_EQ(frames[i].caption, words);
    EXPECT_EQ(frames[i].payload_text, words + "::" + std::string(ov::kStreamSignaturesB64[i - 1]));
    EXPECT_EQ(qr_decode(frames[i].qr), frames[i].payload_text);
  }
}

TEST(Signer, NoTerminalOption) {
  SignOptions opts;
  opts.emit_terminal = false;
  auto frames = sign_stream({{1, "hi"}}, test::jane_cert(), test::jane_key(), opts);
  EXPECT_EQ(frames.size(), 2u);
}

TEST(Signer, RejectsMismatchedKeyAndBadCert) {
  EXPECT_THROW(StreamSigner(test::jane_cert(), test::seeded_key(1)), Error);
  auto bad = test::jane_cert();
  bad.issued_at++;
  EXPECT_THROW(StreamSigner(bad, test::jane_key()), Error);
}

TEST(Signer, IncrementalMatchesBatch) {
  StreamSigner s(test::jane_cert(), test::jane_key());
  auto batch = test::five_frame_stream(test::jane_cert(), test::jane_key());
  EXPECT_EQ(s.certificate_frame().payload_text, batch[0].payload_text);
  EXPECT_EQ(s.next("we are").payload_text, batch[1].payload_text);
  EXPECT_EQ(s.next("not at war").payload_text, batch[2].payload_text);
  EXPECT_EQ(s.next("with anyone").payload_text, batch[3].payload_text);
  EXPECT_EQ(s.terminate().payload_text, batch[4].payload_text);
  EXPECT_TRUE(s.closed());
  EXPECT_THROW(s.next("more"), Error);
}

TEST(Signer, OversizeSegment) {
  StreamSigner s(test::jane_cert(), test::jane_key());
  try {
    s.next(std::string(401, 'a'));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PayloadTooLarge);
  }
  EXPECT_EQ(s.next_index(), 1u);
}

TEST(Signer, WriteStreamLayout) {
  test::TempDir dir;
  auto frames = test::five_frame_stream(test::jane_cert(), test::jane_key());
  write_stream(frames, dir.path(), {2000, 1234}, 2);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    auto png = read_file(dir / frame_png_name(i));
    EXPECT_EQ(qr_decode_png(png), frames[i].payload_text);
  }
  EXPECT_EQ(frame_png_name(3), "frame_00003.png");
  auto meta = nlohmann::json::parse(read_text_file(dir / std::string(kMetaName)));
  EXPECT_EQ(meta["seg_ms"], 2000);
  EXPECT_EQ(meta["created_at"], 1234);
  auto records = read_manifest(dir.path());
  ASSERT_EQ(records.size(), 5u);
  EXPECT_EQ(*records[2].payload_text, frames[2].payload_text);
  EXPECT_EQ(*records[2].png_file, "frame_00002.png");
  EXPECT_FALSE(std::filesystem::exists(dir / "stream.jsonl.tmp"));
}

TEST(Signer, WriteStreamIntoUnwritableLocation) {
  test::TempDir dir;
  write_file_atomic(dir / "file", std::string_view("x"));
  auto frames = test::five_frame_stream(test::jane_cert(), test::jane_key());
  EXPECT_THROW(write_stream(frames, dir / "file" / "sub", {}), Error);
  EXPECT_FALSE(std::filesystem::exists(dir / "file" / "sub" / "stream.jsonl"));
}

TEST(Transcript, Parses) {
  auto words = parse_transcript("{\"start_ms\": 0, \"text\": \"hi\"}\n\n{\"start_ms\": 10, \"text\": \"there\"}\n");
  ASSERT_EQ(words.size(), 2u);
  EXPECT_EQ(words[1].start_ms, 10u);
  EXPECT_EQ(words[1].text, "there");
  EXPECT_THROW(parse_transcript("{\"start_ms\": 0}\n"), Error);
  EXPECT_THROW(parse_transcript("nonsense\n"), Error);
}
