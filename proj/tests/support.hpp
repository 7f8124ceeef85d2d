#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "oracle_vectors.hpp"
#include "wordsig/cert.hpp"
#include "wordsig/crypto.hpp"
#include "wordsig/signer.hpp"
#include "wordsig/verifier.hpp"

namespace wordsig::test {

inline KeyPair key_from_hex(std::string_view hex) { return KeyPair::from_private(from_hex(hex)); }

inline KeyPair jane_key() { return key_from_hex(oracle::kTestPrivateHex); }
inline Certificate jane_cert() { return create_certificate("JaneDoe123", jane_key(), 1700000000); }

inline KeyPair seeded_key(std::uint64_t seed) {
  std::string label = "wordsig-test-seed-" + std::to_string(seed);
  return generate_keypair(sha256(as_bytes(label)));
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("wordsig-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<FrameInput> to_inputs(const std::vector<Frame>& frames) {
  std::vector<FrameInput> out;
  for (const auto& f : frames) out.push_back({f.index, f.payload_text, f.caption});
  return out;
}

// Certificate frame, three segments and the terminal frame.
inline std::vector<Frame> five_frame_stream(const Certificate& cert, const KeyPair& key,
                                            std::vector<std::string> words = {"we are", "not at war",
                                                                              "with anyone"}) {
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < words.size(); ++i) segs.push_back({i + 1, words[i]});
  return sign_stream(segs, cert, key);
}

inline std::string random_word(std::mt19937_64& rng) {
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789'.,!?-";
  std::uniform_int_distribution<std::size_t> len(1, 10), pick(0, alphabet.size() - 1);
  std::string w;
  for (std::size_t i = len(rng); i > 0; --i) w += alphabet[pick(rng)];
  return w;
}

}  // namespace wordsig::test
