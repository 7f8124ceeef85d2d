#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wordsig/cert.hpp"

namespace wordsig {

// $WORDSIG_HOME, else $XDG_STATE_HOME/wordsig, else ~/.local/state/wordsig.
std::filesystem::path default_state_dir();

inline constexpr std::string_view kTrustedFile = "trusted.jsonl";
inline constexpr std::string_view kRevokedFile = "revoked.jsonl";

struct TrustEntry {
  std::string name;
  Certificate cert;
  std::uint64_t added_at = 0;
};

// Append-only history of certificates the viewer chose to trust. The latest
// entry for a name is the pinned certificate for that name.
class TrustStore {
 public:
  TrustStore() = default;
  explicit TrustStore(std::filesystem::path path) : path_(std::move(path)) {}

  // A missing file yields an empty store. Lines that fail to parse or whose
  // certificate fails verification are skipped and counted.
  static TrustStore load(const std::filesystem::path& path);
  // JSON Lines {name, cert_b64url, added_at}, written atomically, mode 0600.
  void save() const;

  const std::filesystem::path& path() const { return path_; }
  const std::vector<TrustEntry>& entries() const { return entries_; }
  std::size_t skipped_on_load() const { return skipped_; }

  // Throws Error(InvalidCertificate) and leaves the store unchanged.
  void append_trusted(const Certificate& cert, std::uint64_t now);
  const Certificate* latest_trusted_for(std::string_view name) const;
  bool contains(const Certificate& cert) const;
  // Removes every entry whose public key has this fingerprint.
  std::size_t remove_fingerprint(const Fingerprint& fp);

 private:
  std::filesystem::path path_;
  std::vector<TrustEntry> entries_;
  std::size_t skipped_ = 0;
};

struct RevokedEntry {
  RevocationRecord record;
  // Revocations from .wsigrev files arrive without the certificate; they are
  // checked against the candidate certificate at lookup time instead.
  std::optional<Certificate> cert;
};

class RevokedDb {
 public:
  RevokedDb() = default;

  // JSON Lines {record_b64url, cert_b64url}; missing file yields an empty db.
  // Records that fail verify_revocation against their certificate are skipped.
  static RevokedDb load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // Throws Error(InvalidCertificate) unless verify_revocation(record, cert).
  void add(const RevocationRecord& record, const Certificate& cert);
  void add_unpaired(const RevocationRecord& record);

  const std::vector<RevokedEntry>& entries() const { return entries_; }
  std::size_t skipped_on_load() const { return skipped_; }

  // revoked_at of the first record that names this certificate and verifies
  // under its key.
  std::optional<std::uint64_t> is_revoked(const Certificate& cert) const;

 private:
  std::vector<RevokedEntry> entries_;
  std::size_t skipped_ = 0;
};

}  // namespace wordsig
