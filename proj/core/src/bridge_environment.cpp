#include "uiknow/bridge_environment.hpp"

#include <istream>
#include <ostream>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "uiknow/error.hpp"
#include "uiknow/serialization.hpp"

namespace uiknow {

BridgeEnvironment::BridgeEnvironment(std::unique_ptr<LineTransport> transport, BridgeOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {
  if (options_.app_id.empty()) {
    options_.app_id = observation().source_app;
    if (options_.app_name.empty()) options_.app_name = options_.app_id;
  }
}

nlohmann::json BridgeEnvironment::call(const nlohmann::json& request) {
  const auto line = transport_->round_trip(request.dump());
  nlohmann::json response;
  try {
    response = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::EnvDisconnected, std::string("bridge sent malformed response: ") + e.what());
  }
  if (!response.is_object()) throw Error(ErrorKind::EnvDisconnected, "bridge response is not an object");
  if (!response.value("ok", false)) {
    const auto name = response.value("error", std::string{});
    const auto message = response.value("message", std::string("bridge request failed"));
    throw Error(error_kind_from_string(name).value_or(ErrorKind::Io), message);
  }
  return response;
}

Observation BridgeEnvironment::observation() {
  const auto response = call({{"cmd", "observe"}});
  try {
    auto obs = observation_from_json(response);
    if (obs.source_app.empty()) obs.source_app = options_.app_id;
    return obs;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::EnvDisconnected, std::string("bad observation payload: ") + e.what());
  }
}

void BridgeEnvironment::step(const Action& action) {
  call({{"cmd", "step"}, {"action", action_to_json(action)}});
}

EnvState BridgeEnvironment::get_current_state() {
  const auto response = call({{"cmd", "snapshot"}});
  return {options_.app_id, response.at("token").get<std::string>()};
}

void BridgeEnvironment::restore_to(const EnvState& state) {
  if (state.app != options_.app_id) {
    throw Error(ErrorKind::UnknownState, "state belongs to app '" + state.app + "'");
  }
  call({{"cmd", "restore"}, {"token", state.token}});
}

std::vector<ExplorationAnchor> BridgeEnvironment::app_functions() {
  const auto response = call({{"cmd", "manifest"}});
  auto anchors = parse_manifest_activities(response.value("manifest", std::string{}));
  if (anchors.empty()) {
    throw Error(ErrorKind::AnchorSourceUnavailable, "manifest declares no activities");
  }
  return anchors;
}

std::vector<ExplorationAnchor> parse_manifest_activities(const std::string& manifest) {
  static const std::regex activity(R"(<activity(?:-alias)?\b[^>]*?\bandroid:name\s*=\s*"([^"]+)\")");
  std::vector<ExplorationAnchor> anchors;
  std::set<std::string> seen;
  for (auto it = std::sregex_iterator(manifest.begin(), manifest.end(), activity);
       it != std::sregex_iterator(); ++it) {
    auto name = (*it)[1].str();
    if (seen.insert(name).second) anchors.push_back({std::move(name), AnchorSource::Manifest});
  }
  return anchors;
}

std::string manifest_from_anchors(const AppInfo& app, const std::vector<ExplorationAnchor>& anchors) {
  std::string out = "<manifest package=\"" + app.id + "\">\n  <application android:label=\"" + app.name +
                    "\">\n";
  for (const auto& a : anchors) out += "    <activity android:name=\"" + a.name + "\" />\n";
  out += "  </application>\n</manifest>\n";
  return out;
}

nlohmann::json handle_bridge_request(Environment& env, const nlohmann::json& request) {
  try {
    const auto cmd = request.at("cmd").get<std::string>();
    if (cmd == "observe") {
      auto response = observation_to_json(env.observation());
      response["ok"] = true;
      return response;
    }
    if (cmd == "step") {
      env.step(action_from_json(request.at("action")));
      return {{"ok", true}};
    }
    if (cmd == "snapshot") {
      return {{"ok", true}, {"token", env.get_current_state().token}};
    }
    if (cmd == "restore") {
      env.restore_to({env.app().id, request.at("token").get<std::string>()});
      return {{"ok", true}};
    }
    if (cmd == "manifest") {
      return {{"ok", true}, {"manifest", manifest_from_anchors(env.app(), env.app_functions())}};
    }
    return {{"ok", false}, {"error", "Io"}, {"message", "unknown command '" + cmd + "'"}};
  } catch (const Error& e) {
    return {{"ok", false}, {"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
  } catch (const nlohmann::json::exception& e) {
    return {{"ok", false}, {"error", "Io"}, {"message", e.what()}};
  }
}

void serve_bridge(Environment& env, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json response;
    try {
      response = handle_bridge_request(env, nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      response = {{"ok", false}, {"error", "Io"}, {"message", e.what()}};
    }
    out << response.dump() << '\n' << std::flush;
  }
}

}  // namespace uiknow
