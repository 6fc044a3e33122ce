#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uiknow/environment.hpp"

namespace uiknow {

/// Newline-delimited request/response channel to a device bridge.
/// Implementations throw EnvDisconnected when the peer goes away.
class LineTransport {
 public:
  virtual ~LineTransport() = default;
  virtual std::string round_trip(const std::string& request_line) = 0;
};

/// Spawns `argv` and talks over its stdin/stdout.
std::unique_ptr<LineTransport> make_process_transport(const std::vector<std::string>& argv);

std::unique_ptr<LineTransport> make_tcp_transport(const std::string& host, std::uint16_t port,
                                                  std::chrono::milliseconds timeout);

struct BridgeOptions {
  /// Taken from the first observation when empty.
  std::string app_id;
  std::string app_name;
  bool arbitrary_restore = false;
};

/// Environment backed by an external bridge process speaking one JSON object
/// per line: requests `{"cmd": "observe"|"step"|"snapshot"|"restore"|"manifest", ...}`,
/// responses `{"ok": true, ...}` or `{"ok": false, "error": <kind>, "message": ...}`.
class BridgeEnvironment final : public Environment {
 public:
  BridgeEnvironment(std::unique_ptr<LineTransport> transport, BridgeOptions options);

  Observation observation() override;
  void step(const Action& action) override;
  EnvState get_current_state() override;
  void restore_to(const EnvState& state) override;
  std::vector<ExplorationAnchor> app_functions() override;
  EnvCapabilities capabilities() const override { return {options_.arbitrary_restore}; }
  AppInfo app() const override { return {options_.app_id, options_.app_name}; }

 private:
  nlohmann::json call(const nlohmann::json& request);

  std::unique_ptr<LineTransport> transport_;
  BridgeOptions options_;
};

/// Server side of the protocol: answers one request against `env`.
nlohmann::json handle_bridge_request(Environment& env, const nlohmann::json& request);

/// Serves requests line by line until EOF.
void serve_bridge(Environment& env, std::istream& in, std::ostream& out);

/// Manifest text synthesised from an environment's anchors, as a bridge would
/// return from `adb shell dumpsys package` or an extracted AndroidManifest.xml.
std::string manifest_from_anchors(const AppInfo& app, const std::vector<ExplorationAnchor>& anchors);

/// Accepts TCP connections on localhost and serves each until it closes.
class BridgeTcpServer {
 public:
  BridgeTcpServer(Environment& env, std::uint16_t port = 0);
  ~BridgeTcpServer();
  BridgeTcpServer(const BridgeTcpServer&) = delete;
  BridgeTcpServer& operator=(const BridgeTcpServer&) = delete;

  std::uint16_t port() const noexcept;
  /// Blocks until one client connects and disconnects.
  void serve_one();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace uiknow
