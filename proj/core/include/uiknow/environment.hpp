#pragma once

#include <string>
#include <vector>

#include "uiknow/action.hpp"
#include "uiknow/domain.hpp"

namespace uiknow {

/// Opaque snapshot token. Only the environment instance that issued it can restore it.
struct EnvState {
  std::string app;
  std::string token;
  friend bool operator==(const EnvState&, const EnvState&) = default;
};

enum class AnchorSource { Manifest, ProvidedList };

/// Developer-declared functional entry point, e.g. an activity class name.
struct ExplorationAnchor {
  std::string name;
  AnchorSource source = AnchorSource::ProvidedList;
  friend bool operator==(const ExplorationAnchor&, const ExplorationAnchor&) = default;
};

struct EnvCapabilities {
  /// False when only the initial snapshot can be restored (typical for real devices).
  bool arbitrary_restore = true;
};

struct AppInfo {
  std::string id;
  std::string name;
};

/// Stateful GUI environment. One instance is strictly serial.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Observation observation() = 0;
  /// Throws InvalidActionIndex when an index-bearing action names no element.
  virtual void step(const Action& action) = 0;
  virtual EnvState get_current_state() = 0;
  virtual void restore_to(const EnvState& state) = 0;
  /// Throws AnchorSourceUnavailable when the app declares none.
  virtual std::vector<ExplorationAnchor> app_functions() = 0;

  virtual EnvCapabilities capabilities() const = 0;
  virtual AppInfo app() const = 0;
};

/// Activity names declared in an Android-style manifest, in declaration order,
/// duplicates dropped.
std::vector<ExplorationAnchor> parse_manifest_activities(const std::string& manifest);

}  // namespace uiknow
