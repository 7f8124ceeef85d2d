// wordsig: key, certificate, signing and verification commands.
//
// Exit status: 0 verified, 1 unterminated, 2 possibly fake, 3 fake,
// 4 malformed input or I/O failure, 5 usage error.

#include <unistd.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <string>
#include <vector>

#include "wordsig/cert.hpp"
#include "wordsig/error.hpp"
#include "wordsig/signer.hpp"
#include "wordsig/trust_store.hpp"
#include "wordsig/verifier.hpp"

namespace fs = std::filesystem;
using namespace wordsig;

namespace {

constexpr int kExitMalformed = 4;
constexpr int kExitUsage = 5;

std::uint64_t now_or_source_date() {
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      return std::stoull(sde);
    } catch (const std::exception&) {
    }
  }
  return static_cast<std::uint64_t>(std::time(nullptr));
}

// Names are free-form UTF-8; file names keep only a portable subset.
std::string file_stem(const std::string& name) {
  std::string out;
  for (unsigned char c : name) out += (std::isalnum(c) || c == '-' || c == '_' || c == '.') ? static_cast<char>(c) : '_';
  return out;
}

fs::path state_file(std::string_view name) { return default_state_dir() / name; }

class TerminalOracle final : public TrustOracle {
 public:
  bool ask(const TrustQuestion& q) override {
    for (const auto& line : q.display) std::cout << line << "\n";
    std::cout << "[y/N] " << std::flush;
    std::string answer;
    if (!std::getline(std::cin, answer)) return false;
    return answer == "y" || answer == "Y" || answer == "yes";
  }
};

struct KeygenArgs {
  std::string name, out, entropy_hex;
  std::optional<std::uint64_t> issued_at;
};

int run_keygen(const KeygenArgs& a) {
  if (!is_valid_name(a.name)) {
    std::cerr << "wordsig: invalid name (1-64 bytes of UTF-8, no control characters, no \"::\")\n";
    return kExitUsage;
  }
  std::optional<std::array<std::uint8_t, 32>> entropy;
  if (!a.entropy_hex.empty()) {
    Bytes raw;
    if (a.entropy_hex.size() == 64) raw = from_hex(a.entropy_hex);
    if (raw.size() != 32) {
      std::cerr << "wordsig: --entropy-hex needs 64 hex digits\n";
      return kExitUsage;
    }
    entropy = to_array<32>(raw);
  }
  KeyPair key = generate_keypair(entropy);
  Certificate cert = create_certificate(a.name, key, a.issued_at.value_or(now_or_source_date()));
  fs::create_directories(a.out);
  const fs::path base = fs::path(a.out) / file_stem(a.name);
  write_key_file(base.string() + ".key", key);
  write_certificate_file(base.string() + ".wsigcert", cert);
  std::cout << fingerprint(cert.public_point).hex() << "\n";
  return 0;
}

int run_cert_show(const std::string& path) {
  Certificate c = read_certificate_file(path);
  std::cout << "name:         " << c.name << "\n"
            << "version:      " << int(c.version) << "\n"
            << "issued_at:    " << format_utc(c.issued_at) << "\n"
            << "public_key:   " << to_hex(c.public_point) << "\n"
            << "fingerprint:  " << fingerprint(c.public_point).hex() << "\n"
            << "signature:    " << (verify_certificate(c) ? "valid" : "INVALID") << "\n"
            << "endorsements: " << c.endorsements.size() << "\n";
  for (const auto& e : c.endorsements) std::cout << "  " << e.endorser.hex() << "\n";
  return verify_certificate(c) ? 0 : 3;
}

int run_cert_endorse(const std::string& cert_path, const std::string& key_path, const std::string& out) {
  Certificate c = endorse_certificate(read_certificate_file(cert_path), read_key_file(key_path));
  write_certificate_file(out, c);
  return 0;
}

struct SignArgs {
  std::string key, cert, transcript, out;
  std::uint32_t seg_ms = kDefaultSegmentMs;
  bool no_terminal = false;
  int png_scale = 8;
};

int run_sign(const SignArgs& a) {
  KeyPair key = read_key_file(a.key);
  Certificate cert = read_certificate_file(a.cert);
  auto segments = segment_transcript(read_transcript(a.transcript), a.seg_ms);
  SignOptions opts;
  opts.emit_terminal = !a.no_terminal;
  auto frames = sign_stream(segments, cert, key, opts);
  write_stream(frames, a.out, {a.seg_ms, now_or_source_date()}, a.png_scale);
  std::cerr << "wrote " << frames.size() << " frames to " << a.out << "\n";
  return 0;
}

struct VerifyArgs {
  std::string stream, trust_store;
  std::vector<std::string> revoked;
  bool yes = false, no = false, interactive = false;
};

RevokedDb load_revoked(const std::vector<std::string>& paths) {
  RevokedDb db = RevokedDb::load(state_file(kRevokedFile));
  for (const auto& p : paths) {
    if (fs::path(p).extension() == ".jsonl") {
      for (const auto& e : RevokedDb::load(p).entries()) {
        if (e.cert)
          db.add(e.record, *e.cert);
        else
          db.add_unpaired(e.record);
      }
    } else {
      db.add_unpaired(read_revocation_file(p));
    }
  }
  return db;
}

int run_verify(const VerifyArgs& a) {
  const fs::path trust_path = a.trust_store.empty() ? state_file(kTrustedFile) : fs::path(a.trust_store);
  TrustStore store = TrustStore::load(trust_path);
  RevokedDb revoked = load_revoked(a.revoked);

  // Without an explicit mode, ask only when a person can answer.
  const bool interactive = a.interactive || (!a.yes && !a.no && isatty(STDIN_FILENO));
  std::unique_ptr<TrustOracle> oracle;
  if (interactive)
    oracle = std::make_unique<TerminalOracle>();
  else
    oracle = std::make_unique<FixedOracle>(a.yes);

  VerifyResult r = verify_stream(a.stream, store, revoked, *oracle, static_cast<std::uint64_t>(std::time(nullptr)));
  for (const auto& ev : r.log)
    if (ev.ok && ev.message == verdict_text::kProgress) std::cout << "frame " << ev.index << ": " << ev.message << "\n";
  std::cout << r.verdict.message << "\n";
  if (!r.accepted.empty()) store.save();
  return exit_code(r.verdict.code);
}

int run_revoke(const std::string& key_path, const std::string& cert_path, const std::string& out,
               std::optional<std::uint64_t> revoked_at) {
  RevocationRecord rec =
      create_revocation(read_key_file(key_path), read_certificate_file(cert_path), revoked_at.value_or(now_or_source_date()));
  write_revocation_file(out, rec);
  std::cout << rec.cert_fingerprint.hex() << " revoked on " << format_utc(rec.revoked_at) << "\n";
  return 0;
}

fs::path trust_path_or_default(const std::string& p) { return p.empty() ? state_file(kTrustedFile) : fs::path(p); }

int run_trust_list(const std::string& store_path) {
  TrustStore store = TrustStore::load(trust_path_or_default(store_path));
  for (const auto& e : store.entries())
    std::cout << fingerprint(e.cert.public_point).hex() << "  " << format_utc(e.added_at) << "  " << e.name << "\n";
  return 0;
}

int run_trust_add(const std::string& store_path, const std::string& cert_path) {
  TrustStore store = TrustStore::load(trust_path_or_default(store_path));
  store.append_trusted(read_certificate_file(cert_path), static_cast<std::uint64_t>(std::time(nullptr)));
  store.save();
  return 0;
}

int run_trust_remove(const std::string& store_path, const std::string& fp_hex) {
  Bytes raw;
  if (fp_hex.size() == 64) raw = from_hex(fp_hex);
  if (raw.size() != 32) {
    std::cerr << "wordsig: fingerprint must be 64 hex digits\n";
    return kExitUsage;
  }
  TrustStore store = TrustStore::load(trust_path_or_default(store_path));
  std::size_t n = store.remove_fingerprint(Fingerprint{to_array<32>(raw)});
  store.save();
  std::cout << "removed " << n << " entr" << (n == 1 ? "y" : "ies") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WordSig: signed word streams carried in QR codes"};
  app.require_subcommand(1);

  KeygenArgs kg;
  auto* keygen = app.add_subcommand("keygen", "Create a key pair and self-signed certificate");
  keygen->add_option("--name", kg.name, "Speaker name carried in the certificate")->required();
  keygen->add_option("--out", kg.out, "Output directory")->required();
  keygen->add_option("--entropy-hex", kg.entropy_hex, "64 hex digits of entropy (deterministic key)");
  keygen->add_option("--issued-at", kg.issued_at, "Unix time stored in the certificate");

  auto* cert = app.add_subcommand("cert", "Certificate utilities");
  cert->require_subcommand(1);
  std::string show_path;
  auto* cert_show = cert->add_subcommand("show", "Print a certificate");
  cert_show->add_option("CERT", show_path)->required();
  std::string endorse_cert, endorse_key, endorse_out;
  auto* cert_endorse = cert->add_subcommand("endorse", "Add an endorsement signature");
  cert_endorse->add_option("--cert", endorse_cert)->required();
  cert_endorse->add_option("--key", endorse_key, "Endorser's private key")->required();
  cert_endorse->add_option("--out", endorse_out)->required();

  SignArgs sa;
  auto* sign = app.add_subcommand("sign", "Sign a timed transcript into a frame stream");
  sign->add_option("--key", sa.key)->required();
  sign->add_option("--cert", sa.cert)->required();
  sign->add_option("--transcript", sa.transcript, "JSON Lines {start_ms, text}")->required();
  sign->add_option("--out", sa.out, "Stream directory")->required();
  sign->add_option("--seg-ms", sa.seg_ms)->check(CLI::PositiveNumber);
  sign->add_flag("--no-terminal", sa.no_terminal, "Omit the closing empty frame");
  sign->add_option("--png-scale", sa.png_scale, "Pixels per QR module")->check(CLI::PositiveNumber);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Verify a frame stream");
  verify->add_option("--stream", va.stream)->required();
  verify->add_option("--trust-store", va.trust_store);
  verify->add_option("--revoked", va.revoked, "Revocation file or revoked.jsonl (repeatable)");
  auto* yes = verify->add_flag("--yes", va.yes, "Trust unknown certificates");
  auto* no = verify->add_flag("--no", va.no, "Decline unknown certificates");
  auto* inter = verify->add_flag("--interactive", va.interactive, "Ask on the terminal");
  yes->excludes(no)->excludes(inter);
  no->excludes(inter);

  std::string rv_key, rv_cert, rv_out;
  std::optional<std::uint64_t> rv_at;
  auto* revoke = app.add_subcommand("revoke", "Revoke a certificate with its own key");
  revoke->add_option("--key", rv_key)->required();
  revoke->add_option("--cert", rv_cert)->required();
  revoke->add_option("--out", rv_out)->required();
  revoke->add_option("--revoked-at", rv_at);

  std::string store_path, trust_cert, trust_fp;
  auto* trust = app.add_subcommand("trust", "Manage trusted certificates");
  trust->require_subcommand(1);
  trust->add_option("--trust-store", store_path);
  auto* trust_list = trust->add_subcommand("list");
  auto* trust_add = trust->add_subcommand("add");
  trust_add->add_option("CERT", trust_cert)->required();
  auto* trust_remove = trust->add_subcommand("remove");
  trust_remove->add_option("FINGERPRINT", trust_fp)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*keygen) return run_keygen(kg);
    if (*cert_show) return run_cert_show(show_path);
    if (*cert_endorse) return run_cert_endorse(endorse_cert, endorse_key, endorse_out);
    if (*sign) return run_sign(sa);
    if (*verify) return run_verify(va);
    if (*revoke) return run_revoke(rv_key, rv_cert, rv_out, rv_at);
    if (*trust_list) return run_trust_list(store_path);
    if (*trust_add) return run_trust_add(store_path, trust_cert);
    if (*trust_remove) return run_trust_remove(store_path, trust_fp);
  } catch (const Error& e) {
    std::cerr << "wordsig: " << e.what() << "\n";
    return e.code() == ErrorCode::MalformedName ? kExitUsage : kExitMalformed;
  } catch (const std::exception& e) {
    std::cerr << "wordsig: " << e.what() << "\n";
    return kExitMalformed;
  }
  return kExitUsage;
}
