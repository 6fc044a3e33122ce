#pragma once

#include <map>
#include <vector>

#include "uiknow/environment.hpp"

namespace uiknow {

/// Gives arbitrary snapshot/restore on top of an environment that can only
/// return to its initial state: a snapshot records the action prefix taken
/// since construction, and restoring resets the inner environment and replays
/// that prefix.
///
/// Replay assumes the inner environment is deterministic under the prefix.
class PrefixReplayEnvironment final : public Environment {
 public:
  explicit PrefixReplayEnvironment(Environment& inner);

  Observation observation() override { return inner_.observation(); }
  void step(const Action& action) override;
  EnvState get_current_state() override;
  void restore_to(const EnvState& state) override;
  std::vector<ExplorationAnchor> app_functions() override { return inner_.app_functions(); }
  EnvCapabilities capabilities() const override { return {true}; }
  AppInfo app() const override { return inner_.app(); }

  std::size_t replayed_actions() const noexcept { return replayed_; }

 private:
  Environment& inner_;
  EnvState initial_;
  std::vector<Action> prefix_;
  std::map<std::string, std::vector<Action>> snapshots_;
  std::size_t replayed_ = 0;
};

}  // namespace uiknow
