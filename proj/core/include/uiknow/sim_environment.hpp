#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uiknow/environment.hpp"

namespace uiknow {

/// Screen transition triggered by an action. Rules without `index` apply to
/// element-free actions such as navigate_back.
struct SimRule {
  std::optional<int> index;
  std::string action;
  std::optional<std::string> input_pattern;  // ECMAScript regex, full match
  std::optional<std::string> direction;      // scroll only
  std::optional<std::string> target;         // stay on the screen when absent
  std::map<std::string, std::string> set;    // "$text" expands to the typed text
};

struct SimElement {
  UiElement element;
  std::optional<Rgb> color;
};

struct SimScreen {
  std::optional<Rgb> background;
  std::vector<SimElement> elements;
  std::vector<SimRule> rules;
};

/// Scripted stand-in for a real app, loaded from JSON.
struct SimAppModel {
  std::string app;
  std::string name;
  int width = 360;
  int height = 640;
  std::string initial_screen;
  std::map<std::string, SimScreen> screens;
  std::optional<std::vector<ExplorationAnchor>> anchors;

  /// Throws InvalidModel on dangling targets, bad geometry or duplicate indices.
  void validate() const;

  static SimAppModel from_json(const nlohmann::json& j);
  static SimAppModel load(const std::filesystem::path& path);
};

struct SimOptions {
  /// When false, only the initial snapshot may be restored, like a device.
  bool arbitrary_restore = true;
};

class SimEnvironment final : public Environment {
 public:
  explicit SimEnvironment(SimAppModel model, SimOptions options = {});

  Observation observation() override;
  void step(const Action& action) override;
  EnvState get_current_state() override;
  void restore_to(const EnvState& state) override;
  std::vector<ExplorationAnchor> app_functions() override;
  EnvCapabilities capabilities() const override { return {options_.arbitrary_restore}; }
  AppInfo app() const override { return {model_.app, model_.name}; }

  const std::string& screen_id() const noexcept { return screen_; }
  const std::map<std::string, std::string>& variables() const noexcept { return vars_; }
  std::uint64_t step_count() const noexcept { return steps_; }
  const SimAppModel& model() const noexcept { return model_; }

 private:
  Image render(const std::string& screen, const std::map<std::string, std::string>& vars) const;
  std::string encode_state(const std::string& screen, const std::map<std::string, std::string>& vars) const;

  SimAppModel model_;
  SimOptions options_;
  std::uint64_t instance_;
  std::string screen_;
  std::map<std::string, std::string> vars_;
  std::uint64_t steps_ = 0;
  std::string initial_token_;
};

/// Stable 64-bit FNV-1a, used to seed deterministic synthesis.
std::uint64_t stable_hash(std::string_view text) noexcept;

}  // namespace uiknow
