#include "wordsig/trust_store.hpp"

#include <cstdlib>
#include <json.hpp>
#include <sstream>

#include "wordsig/error.hpp"
#include "wordsig/io.hpp"

namespace wordsig {

namespace fs = std::filesystem;

namespace {

constexpr fs::perms kPrivateMode = fs::perms::owner_read | fs::perms::owner_write;

std::vector<std::string> read_lines_if_exists(const fs::path& path) {
  std::vector<std::string> lines;
  std::error_code ec;
  if (!fs::exists(path, ec)) return lines;
  std::istringstream in(read_text_file(path));
  for (std::string line; std::getline(in, line);)
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  return lines;
}

}  // namespace

fs::path default_state_dir() {
  if (const char* home = std::getenv("WORDSIG_HOME"); home && *home) return home;
  if (const char* xdg = std::getenv("XDG_STATE_HOME"); xdg && *xdg) return fs::path(xdg) / "wordsig";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".local" / "state" / "wordsig";
  return fs::current_path() / ".wordsig";
}

TrustStore TrustStore::load(const fs::path& path) {
  TrustStore store(path);
  for (const auto& line : read_lines_if_exists(path)) {
    try {
      auto j = nlohmann::json::parse(line);
      TrustEntry e;
      e.name = j.at("name").get<std::string>();
      e.cert = parse_certificate(base64url_decode(j.at("cert_b64url").get<std::string>()));
      e.added_at = j.at("added_at").get<std::uint64_t>();
      if (!verify_certificate(e.cert) || e.cert.name != e.name) {
        ++store.skipped_;
        continue;
      }
      store.entries_.push_back(std::move(e));
    } catch (const nlohmann::json::exception&) {
      ++store.skipped_;
    } catch (const Error&) {
      ++store.skipped_;
    }
  }
  return store;
}

void TrustStore::save() const {
  if (path_.empty()) throw Error(ErrorCode::Io, "trust store has no path");
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  std::string out;
  for (const auto& e : entries_) {
    nlohmann::ordered_json j;
    j["name"] = e.name;
    j["cert_b64url"] = base64url_encode(serialize_certificate(e.cert));
    j["added_at"] = e.added_at;
    out += j.dump() + "\n";
  }
  write_file_atomic(path_, as_bytes(out), kPrivateMode);
}

void TrustStore::append_trusted(const Certificate& cert, std::uint64_t now) {
  if (!verify_certificate(cert)) throw Error(ErrorCode::InvalidCertificate, "refusing to trust an invalid certificate");
  entries_.push_back({cert.name, cert, now});
}

const Certificate* TrustStore::latest_trusted_for(std::string_view name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->name == name) return &it->cert;
  return nullptr;
}

bool TrustStore::contains(const Certificate& cert) const {
  for (const auto& e : entries_)
    if (same_identity(e.cert, cert)) return true;
  return false;
}

std::size_t TrustStore::remove_fingerprint(const Fingerprint& fp) {
  return std::erase_if(entries_, [&](const TrustEntry& e) { return fingerprint(e.cert.public_point) == fp; });
}

RevokedDb RevokedDb::load(const fs::path& path) {
  RevokedDb db;
  for (const auto& line : read_lines_if_exists(path)) {
    try {
      auto j = nlohmann::json::parse(line);
      RevokedEntry e;
      e.record = parse_revocation(base64url_decode(j.at("record_b64url").get<std::string>()));
      if (j.contains("cert_b64url")) {
        e.cert = parse_certificate(base64url_decode(j.at("cert_b64url").get<std::string>()));
        if (!verify_revocation(e.record, *e.cert)) {
          ++db.skipped_;
          continue;
        }
      }
      db.entries_.push_back(std::move(e));
    } catch (const nlohmann::json::exception&) {
      ++db.skipped_;
    } catch (const Error&) {
      ++db.skipped_;
    }
  }
  return db;
}

void RevokedDb::save(const fs::path& path) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::string out;
  for (const auto& e : entries_) {
    nlohmann::ordered_json j;
    j["record_b64url"] = base64url_encode(serialize_revocation(e.record));
    if (e.cert) j["cert_b64url"] = base64url_encode(serialize_certificate(*e.cert));
    out += j.dump() + "\n";
  }
  write_file_atomic(path, as_bytes(out), kPrivateMode);
}

void RevokedDb::add(const RevocationRecord& record, const Certificate& cert) {
  if (!verify_revocation(record, cert))
    throw Error(ErrorCode::InvalidCertificate, "revocation record does not verify against the certificate");
  entries_.push_back({record, cert});
}

void RevokedDb::add_unpaired(const RevocationRecord& record) { entries_.push_back({record, std::nullopt}); }

std::optional<std::uint64_t> RevokedDb::is_revoked(const Certificate& cert) const {
  for (const auto& e : entries_) {
    if (verify_revocation(e.record, cert)) return e.record.revoked_at;
  }
  return std::nullopt;
}

}  // namespace wordsig
