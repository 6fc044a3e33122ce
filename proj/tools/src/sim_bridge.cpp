// Serves a simulated app over the device-bridge protocol, on stdin/stdout or
// on a localhost TCP port. Handy for exercising `--env exec:` and `tcp://`.

#include <cstdlib>
#include <iostream>
#include <string>

#include "uiknow/bridge_environment.hpp"
#include "uiknow/config.hpp"
#include "uiknow/error.hpp"
#include "uiknow/sim_environment.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: uiknow-sim-bridge MODEL.json [--port N] [--once]\n";
    return 2;
  }
  int port = -1;
  bool once = false;
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--port" && i + 1 < argc) {
      port = std::atoi(argv[++i]);
    } else if (arg == "--once") {
      once = true;
    } else {
      std::cerr << "unknown argument " << arg << "\n";
      return 2;
    }
  }
  try {
    uiknow::configure_logging("warn");
    uiknow::SimEnvironment env(uiknow::SimAppModel::load(argv[1]));
    if (port < 0) {
      uiknow::serve_bridge(env, std::cin, std::cout);
      return 0;
    }
    uiknow::BridgeTcpServer server(env, static_cast<std::uint16_t>(port));
    std::cout << server.port() << std::endl;
    do {
      server.serve_one();
    } while (!once);
  } catch (const uiknow::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
