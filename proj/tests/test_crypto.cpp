#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "wordsig/error.hpp"

using namespace wordsig;
namespace ov = wordsig::oracle;

TEST(Crypto, EntropyDerivationMatchesReference) {
  KeyPair k = generate_keypair(to_array<32>(from_hex(ov::kTestEntropyHex)));
  EXPECT_EQ(to_hex(k.private_scalar()), ov::kTestPrivateHex);
  EXPECT_EQ(to_hex(k.public_point()), ov::kTestPublicHex);
  EXPECT_EQ(fingerprint(k.public_point()).hex(), ov::kTestFingerprintHex);
}

TEST(Crypto, ZeroEntropyRehashes) {
  KeyPair k = generate_keypair(std::array<std::uint8_t, 32>{});
  EXPECT_EQ(to_hex(k.private_scalar()), ov::kZeroEntropyPrivateHex);
  EXPECT_EQ(to_hex(k.public_point()), ov::kZeroEntropyPublicHex);
}

TEST(Crypto, SampleSignatureIsDeterministic) {
  KeyPair k = test::jane_key();
  Signature a = sign(as_bytes("sample"), k);
  Signature b = sign(as_bytes("sample"), k);
  EXPECT_EQ(a, b);
  EXPECT_EQ(to_hex(a.bytes), ov::kSampleSignatureHex);
  EXPECT_TRUE(verify(as_bytes("sample"), a, k.public_point()));
  EXPECT_FALSE(verify(as_bytes("sample"), Signature::from_bytes(from_hex(ov::kSampleHighSTwinHex)), k.public_point()));
}

TEST(Crypto, ReferenceVectors) {
  for (const auto& v : ov::kSignatureVectors) {
    SCOPED_TRACE(std::string(v.private_hex));
    KeyPair k = test::key_from_hex(v.private_hex);
    EXPECT_EQ(to_hex(k.public_point()), v.public_hex);
    Signature s = sign(as_bytes(v.message), k);
    EXPECT_EQ(to_hex(s.bytes), v.signature_hex);
    EXPECT_TRUE(verify(as_bytes(v.message), Signature::from_bytes(from_hex(v.signature_hex)), k.public_point()));
    EXPECT_FALSE(verify(as_bytes(v.message), Signature::from_bytes(from_hex(v.high_s_twin_hex)), k.public_point()));
  }
}

TEST(Crypto, RejectsWrongMessageKeyAndGarbage) {
  KeyPair k = test::jane_key();
  KeyPair other = test::seeded_key(1);
  Signature s = sign(as_bytes("hello"), k);
  EXPECT_FALSE(verify(as_bytes("hellp"), s, k.public_point()));
  EXPECT_FALSE(verify(as_bytes("hello"), s, other.public_point()));
  EXPECT_FALSE(verify(as_bytes("hello"), Signature{}, k.public_point()));

  Signature all_ff;
  all_ff.bytes.fill(0xff);
  EXPECT_FALSE(verify(as_bytes("hello"), all_ff, k.public_point()));

  PublicKey off_curve = k.public_point();
  off_curve[32] ^= 0x01;
  if (!is_valid_public_point(off_curve)) {
    EXPECT_FALSE(verify(as_bytes("hello"), s, off_curve));
  }
  Bytes short_key(k.public_point().begin(), k.public_point().end() - 1);
  EXPECT_FALSE(verify(as_bytes("hello"), s, short_key));
}

TEST(Crypto, SignaturesAreLowS) {
  // n/2 rounded down, big-endian.
  const Bytes half_n = from_hex("7fffffffffffffffffffffffffffffff5d576e7357a4501ddfe92f46681b20a0");
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    KeyPair k = test::seeded_key(i);
    std::string msg = test::random_word(rng);
    Signature s = sign(as_bytes(msg), k);
    Bytes s_part(s.bytes.begin() + 32, s.bytes.end());
    EXPECT_LE(s_part, half_n);
    EXPECT_TRUE(verify(as_bytes(msg), s, k.public_point()));
  }
}

TEST(Crypto, PrivateScalarRange) {
  EXPECT_THROW(KeyPair::from_private(Bytes(32, 0)), Error);
  EXPECT_THROW(KeyPair::from_private(from_hex("fffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141")), Error);
  EXPECT_THROW(KeyPair::from_private(Bytes(31, 1)), Error);
  EXPECT_NO_THROW(KeyPair::from_private(from_hex("fffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364140")));
}

TEST(Crypto, RandomKeysDiffer) {
  EXPECT_NE(generate_keypair().public_point(), generate_keypair().public_point());
}

TEST(Crypto, FingerprintNeedsCompressedKey) {
  EXPECT_THROW(fingerprint(Bytes(65, 4)), Error);
}

TEST(Crypto, Sha256KnownAnswer) {
  EXPECT_EQ(to_hex(sha256(as_bytes("abc"))), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
