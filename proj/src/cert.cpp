#include "wordsig/cert.hpp"

#include <algorithm>
#include <cctype>

#include "wordsig/error.hpp"
#include "wordsig/io.hpp"

namespace wordsig {

namespace {

constexpr std::string_view kCertMagic = "WSIG1-CERT";
constexpr std::string_view kRevokeMagic = "WSIG1-REVOKE";
constexpr std::string_view kCaptionPrefix = "[";
constexpr std::string_view kCaptionSuffix = "'s public key certificate]";

bool valid_utf8_without_controls(std::string_view s) {
  if (!is_valid_utf8(s)) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x20 || c == 0x7f) return false;
    // C1 controls U+0080..U+009F
    if (c == 0xc2 && i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) <= 0x9f) return false;
  }
  return true;
}

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedCertificate, what); }

// Files may hold the raw layout or its base64url text (optionally followed by
// whitespace).
Bytes decode_file_payload(const Bytes& raw, std::string_view raw_magic) {
  if (!raw_magic.empty() && raw.size() >= raw_magic.size() && std::equal(raw_magic.begin(), raw_magic.end(), raw.begin()))
    return raw;
  std::string text = to_string(raw);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  try {
    return base64url_decode(text);
  } catch (const Error&) {
    return raw;
  }
}

}  // namespace

bool same_identity(const Certificate& a, const Certificate& b) {
  return a.version == b.version && a.name == b.name && a.public_point == b.public_point &&
         a.issued_at == b.issued_at && a.self_signature == b.self_signature;
}

bool is_valid_name(std::string_view name) {
  return !name.empty() && name.size() <= kMaxNameBytes && name.find("::") == std::string_view::npos &&
         valid_utf8_without_controls(name);
}

void check_name(std::string_view name) {
  if (!is_valid_name(name))
    throw Error(ErrorCode::MalformedName,
                "certificate names must be 1-64 bytes of UTF-8 without control characters or \"::\"");
}

Bytes canonical_bytes(std::uint8_t version, std::string_view name, const PublicKey& public_point,
                      std::uint64_t issued_at) {
  check_name(name);
  Bytes out;
  out.reserve(kCertMagic.size() + 1 + 2 + name.size() + public_point.size() + 8);
  out.insert(out.end(), kCertMagic.begin(), kCertMagic.end());
  out.push_back(version);
  put_be16(out, static_cast<std::uint16_t>(name.size()));
  out.insert(out.end(), name.begin(), name.end());
  out.insert(out.end(), public_point.begin(), public_point.end());
  put_be64(out, issued_at);
  return out;
}

Bytes canonical_bytes(const Certificate& cert) {
  return canonical_bytes(cert.version, cert.name, cert.public_point, cert.issued_at);
}

Certificate create_certificate(std::string_view name, const KeyPair& key, std::uint64_t issued_at) {
  Certificate cert;
  cert.name = std::string(name);
  cert.public_point = key.public_point();
  cert.issued_at = issued_at;
  cert.self_signature = sign(canonical_bytes(cert), key);
  return cert;
}

bool verify_certificate(const Certificate& cert) noexcept {
  if (cert.version != kCertVersion || !is_valid_name(cert.name)) return false;
  try {
    return verify(canonical_bytes(cert), cert.self_signature, cert.public_point);
  } catch (...) {
    return false;
  }
}

Certificate endorse_certificate(const Certificate& cert, const KeyPair& endorser) {
  if (!verify_certificate(cert))
    throw Error(ErrorCode::InvalidCertificate, "cannot endorse a certificate whose self-signature fails");
  Certificate out = cert;
  out.endorsements.push_back({fingerprint(endorser.public_point()), sign(canonical_bytes(cert), endorser)});
  return out;
}

bool verify_endorsement(const Certificate& cert, const Endorsement& endorsement, const PublicKey& endorser_key) {
  if (fingerprint(endorser_key) != endorsement.endorser) return false;
  try {
    return verify(canonical_bytes(cert), endorsement.signature, endorser_key);
  } catch (const Error&) {
    return false;
  }
}

std::string extract_name(const Certificate& cert) { return cert.name; }

std::string extract_name(std::string_view caption) {
  if (caption.size() <= kCaptionPrefix.size() + kCaptionSuffix.size() || !caption.starts_with(kCaptionPrefix) ||
      !caption.ends_with(kCaptionSuffix))
    throw Error(ErrorCode::MalformedCaption, "caption is not a certificate announcement");
  std::string_view name =
      caption.substr(kCaptionPrefix.size(), caption.size() - kCaptionPrefix.size() - kCaptionSuffix.size());
  if (!is_valid_name(name)) throw Error(ErrorCode::MalformedCaption, "caption names an invalid certificate name");
  return std::string(name);
}

std::string certificate_caption(std::string_view name) {
  std::string out(kCaptionPrefix);
  out += name;
  out += kCaptionSuffix;
  return out;
}

Bytes serialize_certificate(const Certificate& cert) {
  if (cert.endorsements.size() > 0xffff) malformed("too many endorsements");
  Bytes out = canonical_bytes(cert);
  out.insert(out.end(), cert.self_signature.bytes.begin(), cert.self_signature.bytes.end());
  put_be16(out, static_cast<std::uint16_t>(cert.endorsements.size()));
  for (const auto& e : cert.endorsements) {
    out.insert(out.end(), e.endorser.digest.begin(), e.endorser.digest.end());
    out.insert(out.end(), e.signature.bytes.begin(), e.signature.bytes.end());
  }
  return out;
}

Certificate parse_certificate(ByteView bytes) {
  ByteView rest = bytes;
  auto take = [&rest](std::size_t n) {
    if (rest.size() < n) malformed("truncated certificate");
    ByteView head = rest.first(n);
    rest = rest.subspan(n);
    return head;
  };

  ByteView magic = take(kCertMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kCertMagic.begin())) malformed("bad certificate magic");

  Certificate cert;
  cert.version = take(1)[0];
  if (cert.version != kCertVersion) malformed("unsupported certificate version");
  std::uint16_t name_len = get_be16(take(2));
  if (name_len == 0 || name_len > kMaxNameBytes) malformed("bad certificate name length");
  cert.name = to_string(take(name_len));
  if (!is_valid_name(cert.name)) malformed("bad certificate name");
  cert.public_point = to_array<33>(take(33));
  cert.issued_at = get_be64(take(8));
  cert.self_signature = Signature::from_bytes(take(64));
  std::uint16_t count = get_be16(take(2));
  cert.endorsements.reserve(count);
  for (std::uint16_t i = 0; i < count; ++i) {
    Endorsement e;
    e.endorser.digest = to_array<32>(take(32));
    e.signature = Signature::from_bytes(take(64));
    cert.endorsements.push_back(e);
  }
  if (!rest.empty()) malformed("trailing bytes after certificate");
  return cert;
}

Bytes revocation_message(const Fingerprint& fp, std::uint64_t revoked_at) {
  Bytes msg(kRevokeMagic.begin(), kRevokeMagic.end());
  msg.insert(msg.end(), fp.digest.begin(), fp.digest.end());
  put_be64(msg, revoked_at);
  return msg;
}

RevocationRecord create_revocation(const KeyPair& key, const Certificate& cert, std::uint64_t revoked_at) {
  if (key.public_point() != cert.public_point)
    throw Error(ErrorCode::KeyMismatch, "a certificate can only be revoked with its own private key");
  RevocationRecord rec;
  rec.cert_fingerprint = fingerprint(cert.public_point);
  rec.revoked_at = revoked_at;
  rec.signature = sign(revocation_message(rec.cert_fingerprint, revoked_at), key);
  return rec;
}

bool verify_revocation(const RevocationRecord& record, const Certificate& cert) noexcept {
  try {
    if (record.cert_fingerprint != fingerprint(cert.public_point)) return false;
    return verify(revocation_message(record.cert_fingerprint, record.revoked_at), record.signature,
                  cert.public_point);
  } catch (...) {
    return false;
  }
}

Bytes serialize_revocation(const RevocationRecord& record) {
  Bytes out(record.cert_fingerprint.digest.begin(), record.cert_fingerprint.digest.end());
  put_be64(out, record.revoked_at);
  out.insert(out.end(), record.signature.bytes.begin(), record.signature.bytes.end());
  return out;
}

RevocationRecord parse_revocation(ByteView bytes) {
  if (bytes.size() != kRevocationRecordSize)
    throw Error(ErrorCode::MalformedInput, "revocation record must be 104 bytes");
  RevocationRecord rec;
  rec.cert_fingerprint.digest = to_array<32>(bytes.first(32));
  rec.revoked_at = get_be64(bytes.subspan(32, 8));
  rec.signature = Signature::from_bytes(bytes.subspan(40, 64));
  return rec;
}

void write_certificate_file(const std::string& path, const Certificate& cert) {
  write_file_atomic(path, base64url_encode(serialize_certificate(cert)) + "\n");
}

Certificate read_certificate_file(const std::string& path) {
  return parse_certificate(decode_file_payload(read_file(path), kCertMagic));
}

void write_revocation_file(const std::string& path, const RevocationRecord& record) {
  write_file_atomic(path, base64url_encode(serialize_revocation(record)) + "\n");
}

RevocationRecord read_revocation_file(const std::string& path) {
  Bytes raw = read_file(path);
  if (raw.size() == kRevocationRecordSize) return parse_revocation(raw);
  return parse_revocation(decode_file_payload(raw, {}));
}

void write_key_file(const std::string& path, const KeyPair& key) {
  const auto d = key.private_scalar();
  write_file_atomic(path, ByteView(d.data(), d.size()),
                    std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
}

KeyPair read_key_file(const std::string& path) {
  Bytes raw = read_file(path);
  if (raw.size() != 32) {
    std::string text = to_string(raw);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
    if (text.size() != 64) throw Error(ErrorCode::MalformedInput, path + ": not a private key file");
    raw = from_hex(text);
  }
  return KeyPair::from_private(raw);
}

}  // namespace wordsig
