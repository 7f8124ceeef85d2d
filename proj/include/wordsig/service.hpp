#pragma once

// Local JSON-over-HTTP session API used by the browser UI.
//
//   POST /v1/sign/sessions                     {key_id}
//   POST /v1/sign/sessions/{id}/segments       {words}
//   POST /v1/sign/sessions/{id}/close
//   POST /v1/verify/sessions                   {trust_store?}
//   POST /v1/verify/sessions/{id}/frames       {index, payload_text | png_b64, caption, last?}
//   POST /v1/verify/sessions/{id}/answer       {accept}
//   POST /v1/verify/sessions/{id}/finish

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "wordsig/cert.hpp"
#include "wordsig/crypto.hpp"

namespace wordsig {

struct SigningIdentity {
  Certificate cert;
  KeyPair key;
};

struct ServiceConfig {
  std::map<std::string, SigningIdentity> keys;
  // Holds trusted.jsonl and revoked.jsonl.
  std::filesystem::path state_dir;
  int png_scale = 8;
};

// {"keys": [{"key_id", "key_file", "cert_file"}], "state_dir"?, "png_scale"?}
// Relative paths resolve against the config file's directory; state_dir
// defaults to default_state_dir(). Throws Error(Io), Error(MalformedInput),
// Error(KeyMismatch).
ServiceConfig load_service_config(const std::filesystem::path& path);

bool is_loopback_address(std::string_view host);

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves until stop(). Returns false if the bind fails.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it, or -1. Serve with run().
  int bind_any_port(const std::string& host);
  void run();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wordsig
