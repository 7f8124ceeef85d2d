// wordsig-service: local HTTP session API for live signing and verification.

#include <csignal>
#include <CLI11.hpp>
#include <iostream>

#include "wordsig/error.hpp"
#include "wordsig/service.hpp"

namespace {
wordsig::Service* g_service = nullptr;
void on_signal(int) {
  if (g_service) g_service->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WordSig session service"};
  std::string config_path, bind = "127.0.0.1";
  int port = 8787;
  app.add_option("--config", config_path, "JSON file listing key/cert registrations")->required();
  app.add_option("--port", port)->check(CLI::Range(0, 65535));
  app.add_option("--bind", bind, "Listen address (loopback by default)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 5;
  }

  try {
    wordsig::Service service(wordsig::load_service_config(config_path));
    if (!wordsig::is_loopback_address(bind)) {
      std::cerr << "WARNING: binding to " << bind
                << " exposes signing keys to the network. There is no authentication and no TLS.\n";
    }
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on " << bind << ":" << port << "\n";
    if (!service.listen(bind, port)) {
      std::cerr << "wordsig-service: cannot bind " << bind << ":" << port << "\n";
      return 4;
    }
  } catch (const std::exception& e) {
    std::cerr << "wordsig-service: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
