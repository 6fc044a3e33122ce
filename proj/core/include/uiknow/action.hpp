#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json_fwd.hpp>

namespace uiknow {

enum class GoalStatus { Complete, Infeasible };
enum class ScrollDirection { Up, Down, Left, Right };

namespace act {

struct Status {
  GoalStatus goal_status = GoalStatus::Complete;
  friend bool operator==(const Status&, const Status&) = default;
};
struct Answer {
  std::string text;
  friend bool operator==(const Answer&, const Answer&) = default;
};
struct Click {
  int index = 0;
  friend bool operator==(const Click&, const Click&) = default;
};
struct LongPress {
  int index = 0;
  friend bool operator==(const LongPress&, const LongPress&) = default;
};
struct Scroll {
  ScrollDirection direction = ScrollDirection::Down;
  std::optional<int> index;
  friend bool operator==(const Scroll&, const Scroll&) = default;
};
struct InputText {
  std::string text;
  int index = 0;
  friend bool operator==(const InputText&, const InputText&) = default;
};
struct KeyboardEnter {
  friend bool operator==(const KeyboardEnter&, const KeyboardEnter&) = default;
};
struct NavigateHome {
  friend bool operator==(const NavigateHome&, const NavigateHome&) = default;
};
struct NavigateBack {
  friend bool operator==(const NavigateBack&, const NavigateBack&) = default;
};
struct OpenApp {
  std::string app_name;
  friend bool operator==(const OpenApp&, const OpenApp&) = default;
};
struct Wait {
  friend bool operator==(const Wait&, const Wait&) = default;
};

}  // namespace act

/// One entry of the reasoning-prompt action catalog.
using Action = std::variant<act::Status, act::Answer, act::Click, act::LongPress, act::Scroll,
                            act::InputText, act::KeyboardEnter, act::NavigateHome,
                            act::NavigateBack, act::OpenApp, act::Wait>;

/// Catalog `action_type` string, e.g. "long_press".
std::string_view action_type(const Action& action);

/// Element index referenced by click/long_press/input_text/scroll-with-index.
std::optional<int> target_index(const Action& action);

/// Status, Answer and Wait never touch the screen.
bool is_interactive(const Action& action);

bool is_terminal(const Action& action);

/// Serializes in the catalog's exact textual form, e.g.
/// `{"action_type": "input_text", "text": "hi", "index": 2}`.
std::string to_catalog_json(const Action& action);

/// Throws UnknownActionType, MissingField or UnparseableAction.
Action action_from_json(const nlohmann::json& object);

nlohmann::json action_to_json(const Action& action);

}  // namespace uiknow
