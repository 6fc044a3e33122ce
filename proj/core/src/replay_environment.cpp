#include "uiknow/replay_environment.hpp"

#include <string>

#include "uiknow/error.hpp"

namespace uiknow {

PrefixReplayEnvironment::PrefixReplayEnvironment(Environment& inner)
    : inner_(inner), initial_(inner.get_current_state()) {}

void PrefixReplayEnvironment::step(const Action& action) {
  inner_.step(action);
  prefix_.push_back(action);
}

EnvState PrefixReplayEnvironment::get_current_state() {
  std::string token = "replay:" + std::to_string(snapshots_.size());
  snapshots_.emplace(token, prefix_);
  return {initial_.app, std::move(token)};
}

void PrefixReplayEnvironment::restore_to(const EnvState& state) {
  auto it = snapshots_.find(state.token);
  if (state.app != initial_.app || it == snapshots_.end()) {
    throw Error(ErrorKind::UnknownState, "state was not produced by this replay environment");
  }
  inner_.restore_to(initial_);
  prefix_.clear();
  for (const auto& action : it->second) {
    // Recorded actions were accepted once; an index error now means the
    // environment diverged during replay, which the caller must see.
    inner_.step(action);
    prefix_.push_back(action);
    ++replayed_;
  }
}

}  // namespace uiknow
