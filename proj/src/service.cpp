#include "wordsig/service.hpp"

#include <openssl/rand.h>

#include <ctime>
#include <httplib.h>
#include <json.hpp>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "wordsig/error.hpp"
#include "wordsig/io.hpp"
#include "wordsig/payload.hpp"
#include "wordsig/qr.hpp"
#include "wordsig/signer.hpp"
#include "wordsig/trust_store.hpp"
#include "wordsig/verifier.hpp"

namespace wordsig {

using nlohmann::json;

namespace {

std::uint64_t unix_now() { return static_cast<std::uint64_t>(std::time(nullptr)); }

std::string new_session_id() {
  std::array<std::uint8_t, 16> raw{};
  if (RAND_bytes(raw.data(), static_cast<int>(raw.size())) != 1) throw std::runtime_error("RAND_bytes failed");
  return to_hex(raw);
}

// Thrown by handlers; carries the HTTP status.
struct HttpError {
  int status;
  std::string message;
};

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw HttpError{400, "request body must be a JSON object"};
  return j;
}

template <typename T>
T field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw HttpError{400, std::string("missing field '") + name + "'"};
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw HttpError{400, std::string("field '") + name + "' has the wrong type"};
  }
}

json verdict_json(const Verdict& v) {
  json j = {{"code", to_string(v.code)}, {"message", v.message}};
  if (v.frame_index) j["frame_index"] = *v.frame_index;
  if (v.revoked_at) j["revoked_at"] = *v.revoked_at;
  return j;
}

json question_json(const TrustQuestion& q) {
  return {{"name", q.name}, {"kind", to_string(q.kind)}, {"display", q.display}, {"text", q.display.back()}};
}

struct SignSession {
  std::mutex mu;
  StreamSigner signer;
  std::optional<json> terminal;

  SignSession(Certificate cert, KeyPair key) : signer(std::move(cert), std::move(key)) {}
};

struct VerifyHandle {
  std::mutex mu;
  VerifySession session;
  std::filesystem::path trust_path;
  bool committed = false;

  VerifyHandle(TrustStore store, RevokedDb revoked, std::filesystem::path path)
      : session(std::move(store), std::move(revoked)), trust_path(std::move(path)) {}
};

template <typename T>
class Registry {
 public:
  std::string add(std::shared_ptr<T> item) {
    std::lock_guard lock(mu_);
    std::string id = new_session_id();
    items_.emplace(id, std::move(item));
    return id;
  }
  std::shared_ptr<T> find(const std::string& id) {
    std::lock_guard lock(mu_);
    auto it = items_.find(id);
    if (it == items_.end()) throw HttpError{404, "unknown session"};
    return it->second;
  }

 private:
  std::mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<T>> items_;
};

// Per-session operations are serialized; a second request racing an
// in-flight one is rejected rather than queued, so chain order never depends
// on scheduling.
std::unique_lock<std::mutex> lock_session(std::mutex& mu) {
  std::unique_lock lock(mu, std::try_to_lock);
  if (!lock.owns_lock()) throw HttpError{409, "another request for this session is in progress"};
  return lock;
}

}  // namespace

bool is_loopback_address(std::string_view host) {
  return host == "localhost" || host == "::1" || host.rfind("127.", 0) == 0;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  ServiceConfig cfg;
  try {
    json j = json::parse(read_text_file(path));
    for (const auto& k : j.at("keys")) {
      auto id = k.at("key_id").get<std::string>();
      KeyPair key = read_key_file(resolve(k.at("key_file").get<std::string>()));
      Certificate cert = read_certificate_file(resolve(k.at("cert_file").get<std::string>()));
      if (key.public_point() != cert.public_point)
        throw Error(ErrorCode::KeyMismatch, "key " + id + " does not match its certificate");
      cfg.keys.emplace(std::move(id), SigningIdentity{std::move(cert), std::move(key)});
    }
    cfg.state_dir = j.contains("state_dir") ? resolve(j["state_dir"].get<std::string>()) : default_state_dir();
    cfg.png_scale = j.value("png_scale", 8);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedInput, path.string() + ": " + e.what());
  }
  if (cfg.png_scale < 1) throw Error(ErrorCode::MalformedInput, "png_scale must be at least 1");
  return cfg;
}

struct Service::Impl {
  ServiceConfig cfg;
  httplib::Server server;
  Registry<SignSession> signing;
  Registry<VerifyHandle> verifying;
  // Single writer for trust-store files.
  std::mutex trust_mu;

  explicit Impl(ServiceConfig c) : cfg(std::move(c)) { routes(); }

  json frame_json(const Frame& f) const {
    return {{"index", f.index},
            {"payload_text", f.payload_text},
            {"caption", f.caption},
            {"png_b64", base64url_encode(render_png(f.qr, cfg.png_scale))}};
  }

  void commit(VerifyHandle& h) {
    if (h.committed || h.session.state() != SessionState::Done) return;
    h.committed = true;
    if (h.session.accepted().empty()) return;
    std::lock_guard lock(trust_mu);
    TrustStore store = TrustStore::load(h.trust_path);
    h.session.commit_trust(store, unix_now());
    store.save();
  }

  json status_json(VerifyHandle& h, SessionStatus st) {
    json out;
    switch (st) {
      case SessionStatus::Ok: out["status"] = "ok"; break;
      case SessionStatus::QuestionPending:
        out["status"] = "question_pending";
        out["question"] = question_json(*h.session.pending_question());
        break;
      case SessionStatus::Done:
        commit(h);
        out["status"] = "done";
        out["verdict"] = verdict_json(*h.session.verdict());
        break;
    }
    out["next_index"] = h.session.next_index();
    return out;
  }

  json open_sign(const json& body) {
    auto key_id = field<std::string>(body, "key_id");
    auto it = cfg.keys.find(key_id);
    if (it == cfg.keys.end()) throw HttpError{404, "unknown key_id"};
    auto s = std::make_shared<SignSession>(it->second.cert, it->second.key);
    json frame0 = frame_json(s->signer.certificate_frame());
    frame0.erase("index");
    return {{"session_id", signing.add(s)}, {"frame0", frame0}};
  }

  json sign_segment(const std::string& id, const json& body) {
    auto s = signing.find(id);
    auto words = field<std::string>(body, "words");
    auto lock = lock_session(s->mu);
    if (s->signer.closed()) throw HttpError{409, "session is closed"};
    try {
      return {{"frame", frame_json(s->signer.next(words))}};
    } catch (const Error& e) {
      if (e.code() == ErrorCode::PayloadTooLarge) throw HttpError{413, e.what()};
      throw HttpError{400, e.what()};
    }
  }

  json close_sign(const std::string& id) {
    auto s = signing.find(id);
    auto lock = lock_session(s->mu);
    if (!s->terminal) s->terminal = json{{"terminal_frame", frame_json(s->signer.terminate())}};
    return *s->terminal;
  }

  json open_verify(const json& body) {
    std::filesystem::path trust_path = cfg.state_dir / kTrustedFile;
    if (body.contains("trust_store")) trust_path = field<std::string>(body, "trust_store");
    TrustStore store;
    {
      std::lock_guard lock(trust_mu);
      store = TrustStore::load(trust_path);
    }
    auto h = std::make_shared<VerifyHandle>(std::move(store), RevokedDb::load(cfg.state_dir / kRevokedFile),
                                            trust_path);
    return {{"session_id", verifying.add(h)}};
  }

  json verify_frame(const std::string& id, const json& body) {
    auto h = verifying.find(id);
    auto lock = lock_session(h->mu);
    VerifySession& vs = h->session;
    if (vs.state() == SessionState::Done) return status_json(*h, SessionStatus::Done);
    if (vs.pending_question()) throw HttpError{409, "a trust question is pending"};

    auto index = field<std::uint64_t>(body, "index");
    if (index != vs.next_index())
      throw HttpError{409, "expected frame " + std::to_string(vs.next_index()) + ", got " + std::to_string(index)};
    FrameInput frame{index, {}, field<std::string>(body, "caption")};

    SessionStatus st;
    if (body.contains("payload_text")) {
      frame.payload_text = field<std::string>(body, "payload_text");
      st = index == 0 ? vs.offer_certificate(frame) : vs.feed(frame);
    } else {
      auto png_b64 = field<std::string>(body, "png_b64");
      std::optional<std::string> decoded;
      std::string failure;
      try {
        decoded = qr_decode_png(base64url_decode(png_b64));
      } catch (const Error& e) {
        failure = e.what();
      }
      if (decoded) {
        frame.payload_text = *decoded;
        st = index == 0 ? vs.offer_certificate(frame) : vs.feed(frame);
      } else {
        st = vs.fail(index, failure);
      }
    }
    if (st == SessionStatus::Ok && body.value("last", false)) {
      vs.finish();
      st = SessionStatus::Done;
    }
    return status_json(*h, st);
  }

  json verify_answer(const std::string& id, const json& body) {
    auto h = verifying.find(id);
    auto accept = field<bool>(body, "accept");
    auto lock = lock_session(h->mu);
    if (!h->session.pending_question()) throw HttpError{409, "no trust question is pending"};
    return status_json(*h, h->session.answer(accept));
  }

  json verify_finish(const std::string& id) {
    auto h = verifying.find(id);
    auto lock = lock_session(h->mu);
    if (h->session.pending_question()) throw HttpError{409, "a trust question is pending"};
    h->session.finish();
    return status_json(*h, SessionStatus::Done);
  }

  using Action = std::function<json(const httplib::Request&, const json&)>;

  httplib::Server::Handler wrap(Action action) {
    return [action = std::move(action)](const httplib::Request& req, httplib::Response& res) {
      json out;
      try {
        out = action(req, parse_body(req));
        res.status = 200;
      } catch (const HttpError& e) {
        res.status = e.status;
        out = {{"error", e.message}};
      } catch (const Error& e) {
        res.status = e.code() == ErrorCode::SessionMisuse ? 409 : 400;
        out = {{"error", e.what()}};
      } catch (const std::exception& e) {
        res.status = 500;
        out = {{"error", e.what()}};
      }
      res.set_content(out.dump(), "application/json");
    };
  }

  void routes() {
    const std::string id = "/([0-9a-f]+)";
    server.Post("/v1/sign/sessions", wrap([this](auto&, const json& b) { return open_sign(b); }));
    server.Post("/v1/sign/sessions" + id + "/segments",
                wrap([this](const httplib::Request& r, const json& b) { return sign_segment(r.matches[1], b); }));
    server.Post("/v1/sign/sessions" + id + "/close",
                wrap([this](const httplib::Request& r, const json&) { return close_sign(r.matches[1]); }));
    server.Post("/v1/verify/sessions", wrap([this](auto&, const json& b) { return open_verify(b); }));
    server.Post("/v1/verify/sessions" + id + "/frames",
                wrap([this](const httplib::Request& r, const json& b) { return verify_frame(r.matches[1], b); }));
    server.Post("/v1/verify/sessions" + id + "/answer",
                wrap([this](const httplib::Request& r, const json& b) { return verify_answer(r.matches[1], b); }));
    server.Post("/v1/verify/sessions" + id + "/finish",
                wrap([this](const httplib::Request& r, const json&) { return verify_finish(r.matches[1]); }));
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int Service::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
void Service::run() { impl_->server.listen_after_bind(); }
void Service::stop() { impl_->server.stop(); }
void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace wordsig
