#include "uiknow/action.hpp"

#include <charconv>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "uiknow/error.hpp"

namespace uiknow {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

std::string_view direction_name(ScrollDirection d) {
  switch (d) {
    case ScrollDirection::Up:
      return "up";
    case ScrollDirection::Down:
      return "down";
    case ScrollDirection::Left:
      return "left";
    case ScrollDirection::Right:
      return "right";
  }
  return "down";
}

using Fields = std::vector<std::pair<std::string, nlohmann::json>>;

Fields catalog_fields(const Action& action) {
  Fields fields{{"action_type", std::string(action_type(action))}};
  std::visit(Overloaded{
                 [&](const act::Status& a) {
                   fields.emplace_back("goal_status", a.goal_status == GoalStatus::Complete
                                                          ? "complete"
                                                          : "infeasible");
                 },
                 [&](const act::Answer& a) { fields.emplace_back("text", a.text); },
                 [&](const act::Click& a) { fields.emplace_back("index", a.index); },
                 [&](const act::LongPress& a) { fields.emplace_back("index", a.index); },
                 [&](const act::Scroll& a) {
                   fields.emplace_back("direction", std::string(direction_name(a.direction)));
                   if (a.index) fields.emplace_back("index", *a.index);
                 },
                 [&](const act::InputText& a) {
                   fields.emplace_back("text", a.text);
                   fields.emplace_back("index", a.index);
                 },
                 [&](const act::OpenApp& a) { fields.emplace_back("app_name", a.app_name); },
                 [](const auto&) {},
             },
             action);
  return fields;
}

const nlohmann::json& require(const nlohmann::json& object, const char* key, std::string_view type) {
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) {
    throw Error(ErrorKind::MissingField,
                std::string(type) + " action requires field '" + key + "'");
  }
  return *it;
}

int as_index(const nlohmann::json& value, const char* key) {
  if (value.is_number_integer()) {
    return value.get<int>();
  }
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (d == static_cast<double>(static_cast<int>(d))) return static_cast<int>(d);
  }
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    int out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc() && ptr == s.data() + s.size()) return out;
  }
  throw Error(ErrorKind::UnparseableAction, std::string("field '") + key + "' is not an integer");
}

std::string as_text(const nlohmann::json& value, const char* key) {
  if (!value.is_string()) {
    throw Error(ErrorKind::UnparseableAction, std::string("field '") + key + "' is not a string");
  }
  return value.get<std::string>();
}

}  // namespace

std::string_view action_type(const Action& action) {
  return std::visit(Overloaded{
                        [](const act::Status&) { return std::string_view("status"); },
                        [](const act::Answer&) { return std::string_view("answer"); },
                        [](const act::Click&) { return std::string_view("click"); },
                        [](const act::LongPress&) { return std::string_view("long_press"); },
                        [](const act::Scroll&) { return std::string_view("scroll"); },
                        [](const act::InputText&) { return std::string_view("input_text"); },
                        [](const act::KeyboardEnter&) { return std::string_view("keyboard_enter"); },
                        [](const act::NavigateHome&) { return std::string_view("navigate_home"); },
                        [](const act::NavigateBack&) { return std::string_view("navigate_back"); },
                        [](const act::OpenApp&) { return std::string_view("open_app"); },
                        [](const act::Wait&) { return std::string_view("wait"); },
                    },
                    action);
}

std::optional<int> target_index(const Action& action) {
  return std::visit(Overloaded{
                        [](const act::Click& a) -> std::optional<int> { return a.index; },
                        [](const act::LongPress& a) -> std::optional<int> { return a.index; },
                        [](const act::InputText& a) -> std::optional<int> { return a.index; },
                        [](const act::Scroll& a) -> std::optional<int> { return a.index; },
                        [](const auto&) -> std::optional<int> { return std::nullopt; },
                    },
                    action);
}

bool is_interactive(const Action& action) {
  return !std::holds_alternative<act::Status>(action) &&
         !std::holds_alternative<act::Answer>(action) && !std::holds_alternative<act::Wait>(action);
}

bool is_terminal(const Action& action) { return std::holds_alternative<act::Status>(action); }

std::string to_catalog_json(const Action& action) {
  std::string out = "{";
  bool first = true;
  for (const auto& [key, value] : catalog_fields(action)) {
    if (!first) out += ", ";
    first = false;
    out += nlohmann::json(key).dump();
    out += ": ";
    out += value.dump();
  }
  out += "}";
  return out;
}

nlohmann::json action_to_json(const Action& action) {
  nlohmann::json object = nlohmann::json::object();
  for (auto& [key, value] : catalog_fields(action)) {
    object[key] = std::move(value);
  }
  return object;
}

Action action_from_json(const nlohmann::json& object) {
  if (!object.is_object()) {
    throw Error(ErrorKind::UnparseableAction, "action is not a JSON object");
  }
  const auto type = as_text(require(object, "action_type", "any"), "action_type");

  if (type == "status") {
    const auto status = as_text(require(object, "goal_status", type), "goal_status");
    if (status == "complete") return act::Status{GoalStatus::Complete};
    if (status == "infeasible") return act::Status{GoalStatus::Infeasible};
    throw Error(ErrorKind::UnparseableAction, "unknown goal_status '" + status + "'");
  }
  if (type == "answer") return act::Answer{as_text(require(object, "text", type), "text")};
  if (type == "click") return act::Click{as_index(require(object, "index", type), "index")};
  if (type == "long_press") return act::LongPress{as_index(require(object, "index", type), "index")};
  if (type == "scroll") {
    const auto dir = as_text(require(object, "direction", type), "direction");
    act::Scroll scroll;
    if (dir == "up") {
      scroll.direction = ScrollDirection::Up;
    } else if (dir == "down") {
      scroll.direction = ScrollDirection::Down;
    } else if (dir == "left") {
      scroll.direction = ScrollDirection::Left;
    } else if (dir == "right") {
      scroll.direction = ScrollDirection::Right;
    } else {
      throw Error(ErrorKind::UnparseableAction, "unknown scroll direction '" + dir + "'");
    }
    if (auto it = object.find("index"); it != object.end() && !it->is_null()) {
      scroll.index = as_index(*it, "index");
    }
    return scroll;
  }
  if (type == "input_text") {
    return act::InputText{as_text(require(object, "text", type), "text"),
                          as_index(require(object, "index", type), "index")};
  }
  if (type == "keyboard_enter") return act::KeyboardEnter{};
  if (type == "navigate_home") return act::NavigateHome{};
  if (type == "navigate_back") return act::NavigateBack{};
  if (type == "open_app") return act::OpenApp{as_text(require(object, "app_name", type), "app_name")};
  if (type == "wait") return act::Wait{};
  throw Error(ErrorKind::UnknownActionType, "unknown action_type '" + type + "'");
}

}  // namespace uiknow
