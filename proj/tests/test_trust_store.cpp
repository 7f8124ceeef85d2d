#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "support.hpp"
#include "wordsig/error.hpp"
#include "wordsig/io.hpp"

using namespace wordsig;

TEST(TrustStore, MissingFileIsEmpty) {
  test::TempDir dir;
  auto s = TrustStore::load(dir / "nope.jsonl");
  EXPECT_TRUE(s.entries().empty());
  EXPECT_EQ(s.latest_trusted_for("x"), nullptr);
}

TEST(TrustStore, SaveLoadIdentity) {
  test::TempDir dir;
  TrustStore s(dir / "trusted.jsonl");
  s.append_trusted(test::jane_cert(), 10);
  s.append_trusted(create_certificate("Bob", test::seeded_key(2), 5), 11);
  s.append_trusted(test::jane_cert(), 12);
  s.save();
  auto perms = std::filesystem::status(s.path()).permissions();
  EXPECT_EQ(perms & (std::filesystem::perms::group_all | std::filesystem::perms::others_all),
            std::filesystem::perms::none);

  auto back = TrustStore::load(s.path());
  ASSERT_EQ(back.entries().size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.entries()[i].cert, s.entries()[i].cert);
    EXPECT_EQ(back.entries()[i].added_at, s.entries()[i].added_at);
    EXPECT_EQ(back.entries()[i].name, s.entries()[i].name);
  }
}

TEST(TrustStore, LatestFollowsAppendOrder) {
  std::mt19937_64 rng(8);
  const std::vector<std::string> names = {"a", "b", "c"};
  std::vector<Certificate> certs;
  for (int i = 0; i < 9; ++i) certs.push_back(create_certificate(names[i % 3], test::seeded_key(100 + i), i));
  for (int trial = 0; trial < 20; ++trial) {
    TrustStore s;
    std::map<std::string, Certificate> expect;
    for (int step = 0; step < 30; ++step) {
      const auto& c = certs[rng() % certs.size()];
      s.append_trusted(c, step);
      expect[c.name] = c;
      for (const auto& n : names) {
        const Certificate* got = s.latest_trusted_for(n);
        if (expect.count(n)) {
          ASSERT_NE(got, nullptr);
          EXPECT_EQ(*got, expect[n]);
        } else {
          EXPECT_EQ(got, nullptr);
        }
      }
    }
  }
}

TEST(TrustStore, RejectsInvalidCertificate) {
  TrustStore s;
  auto bad = test::jane_cert();
  bad.name = "Mallory";
  EXPECT_THROW(s.append_trusted(bad, 0), Error);
  EXPECT_TRUE(s.entries().empty());
}

TEST(TrustStore, SkipsCorruptLines) {
  test::TempDir dir;
  TrustStore s(dir / "t.jsonl");
  s.append_trusted(test::jane_cert(), 1);
  s.save();
  std::string text = read_text_file(s.path());
  write_file_atomic(s.path(), "garbage\n" + text + "{\"name\":\"x\",\"cert_b64url\":\"AAAA\",\"added_at\":1}\n");
  auto back = TrustStore::load(s.path());
  EXPECT_EQ(back.entries().size(), 1u);
  EXPECT_EQ(back.skipped_on_load(), 2u);
}

TEST(TrustStore, RemoveByFingerprint) {
  TrustStore s;
  s.append_trusted(test::jane_cert(), 1);
  s.append_trusted(create_certificate("Bob", test::seeded_key(2), 5), 2);
  s.append_trusted(test::jane_cert(), 3);
  EXPECT_EQ(s.remove_fingerprint(fingerprint(test::jane_key().public_point())), 2u);
  EXPECT_EQ(s.entries().size(), 1u);
  EXPECT_FALSE(s.contains(test::jane_cert()));
}

TEST(TrustStore, ContainsIgnoresEndorsements) {
  TrustStore s;
  s.append_trusted(test::jane_cert(), 1);
  EXPECT_TRUE(s.contains(endorse_certificate(test::jane_cert(), test::seeded_key(5))));
}

TEST(TrustStore, StateDirFromEnvironment) {
  const char* old = std::getenv("WORDSIG_HOME");
  std::string saved = old ? old : "";
  setenv("WORDSIG_HOME", "/tmp/wordsig-home-test", 1);
  EXPECT_EQ(default_state_dir(), std::filesystem::path("/tmp/wordsig-home-test"));
  if (old)
    setenv("WORDSIG_HOME", saved.c_str(), 1);
  else
    unsetenv("WORDSIG_HOME");
}

TEST(RevokedDb, OnlyVerifiedRecordsCount) {
  Certificate c = test::jane_cert();
  RevocationRecord good = create_revocation(test::jane_key(), c, 1710000000);
  RevocationRecord forged = good;
  forged.revoked_at = 1600000000;

  RevokedDb db;
  EXPECT_THROW(db.add(forged, c), Error);
  db.add_unpaired(forged);
  EXPECT_FALSE(db.is_revoked(c).has_value());
  db.add_unpaired(good);
  EXPECT_EQ(db.is_revoked(c), 1710000000u);
  EXPECT_FALSE(db.is_revoked(create_certificate("Bob", test::seeded_key(2), 5)).has_value());
}

TEST(RevokedDb, SaveLoad) {
  test::TempDir dir;
  Certificate c = test::jane_cert();
  RevokedDb db;
  db.add(create_revocation(test::jane_key(), c, 77), c);
  Certificate bob = create_certificate("Bob", test::seeded_key(2), 5);
  db.add_unpaired(create_revocation(test::seeded_key(2), bob, 88));
  db.save(dir / "revoked.jsonl");
  auto back = RevokedDb::load(dir / "revoked.jsonl");
  EXPECT_EQ(back.entries().size(), 2u);
  EXPECT_EQ(back.is_revoked(c), 77u);
  EXPECT_EQ(back.is_revoked(bob), 88u);
}
