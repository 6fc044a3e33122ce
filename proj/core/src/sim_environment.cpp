#include "uiknow/sim_environment.hpp"

#include <atomic>
#include <fstream>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "uiknow/error.hpp"
#include "uiknow/serialization.hpp"

namespace uiknow {

namespace {

std::atomic<std::uint64_t> g_next_instance{1};

std::uint64_t splitmix(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rgb rgb_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorKind::InvalidModel, "colour must be [r, g, b]");
  }
  return {j[0].get<std::uint8_t>(), j[1].get<std::uint8_t>(), j[2].get<std::uint8_t>()};
}

Rgb hashed_colour(std::uint64_t seed, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  auto pick = [&] { return static_cast<std::uint8_t>(lo + static_cast<int>(splitmix(seed) % span)); };
  const auto r = pick();
  const auto g = pick();
  const auto b = pick();
  return {r, g, b};
}

Rgb scale(Rgb c, int numerator) {
  auto f = [numerator](std::uint8_t v) { return static_cast<std::uint8_t>(v * numerator / 255); };
  return {f(c.r), f(c.g), f(c.b)};
}

Rgb darker(Rgb c) { return scale(c, 150); }

bool action_matches(const SimRule& rule, const Action& action) {
  if (rule.action != action_type(action)) return false;
  if (rule.index != target_index(action)) return false;
  if (rule.input_pattern) {
    const auto* input = std::get_if<act::InputText>(&action);
    if (!input || !std::regex_match(input->text, std::regex(*rule.input_pattern))) return false;
  }
  if (rule.direction) {
    const auto* scroll = std::get_if<act::Scroll>(&action);
    if (!scroll) return false;
    const auto dir = action_to_json(*scroll).at("direction").get<std::string>();
    if (dir != *rule.direction) return false;
  }
  return true;
}

std::string expand(const std::string& value, const Action& action) {
  const auto* input = std::get_if<act::InputText>(&action);
  if (!input) return value;
  std::string out;
  for (std::size_t i = 0; i < value.size();) {
    if (value.compare(i, 5, "$text") == 0) {
      out += input->text;
      i += 5;
    } else {
      out += value[i++];
    }
  }
  return out;
}

}  // namespace

std::uint64_t stable_hash(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SimAppModel SimAppModel::from_json(const nlohmann::json& j) {
  SimAppModel m;
  try {
    m.app = j.at("app").get<std::string>();
    m.name = j.value("name", m.app);
    m.width = j.value("width", 360);
    m.height = j.value("height", 640);
    m.initial_screen = j.at("initial_screen").get<std::string>();
    for (const auto& [id, sj] : j.at("screens").items()) {
      SimScreen screen;
      if (auto it = sj.find("background"); it != sj.end()) screen.background = rgb_from_json(*it);
      int position = 0;
      for (const auto& ej : sj.value("elements", nlohmann::json::array())) {
        SimElement se;
        auto copy = ej;
        if (!copy.contains("index")) copy["index"] = position;
        copy.erase("color");
        se.element = copy.get<UiElement>();
        if (auto it = ej.find("color"); it != ej.end()) se.color = rgb_from_json(*it);
        screen.elements.push_back(std::move(se));
        ++position;
      }
      for (const auto& rj : sj.value("rules", nlohmann::json::array())) {
        SimRule rule;
        rule.action = rj.at("action").get<std::string>();
        if (auto it = rj.find("index"); it != rj.end()) rule.index = it->get<int>();
        if (auto it = rj.find("pattern"); it != rj.end()) rule.input_pattern = it->get<std::string>();
        if (auto it = rj.find("direction"); it != rj.end()) rule.direction = it->get<std::string>();
        if (auto it = rj.find("target"); it != rj.end()) rule.target = it->get<std::string>();
        if (auto it = rj.find("set"); it != rj.end()) {
          rule.set = it->get<std::map<std::string, std::string>>();
        }
        screen.rules.push_back(std::move(rule));
      }
      m.screens.emplace(id, std::move(screen));
    }
    if (auto it = j.find("anchors"); it != j.end() && !it->is_null()) {
      std::vector<ExplorationAnchor> anchors;
      for (const auto& aj : *it) {
        ExplorationAnchor a;
        a.name = aj.is_string() ? aj.get<std::string>() : aj.at("name").get<std::string>();
        a.source = aj.is_object() && aj.value("source", std::string{}) == "manifest"
                       ? AnchorSource::Manifest
                       : AnchorSource::ProvidedList;
        anchors.push_back(std::move(a));
      }
      m.anchors = std::move(anchors);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidModel, e.what());
  }
  m.validate();
  return m;
}

SimAppModel SimAppModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open sim model " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidModel, path.string() + ": " + e.what());
  }
  return from_json(j);
}

void SimAppModel::validate() const {
  if (app.empty()) throw Error(ErrorKind::InvalidModel, "model has no app id");
  if (width <= 0 || height <= 0) throw Error(ErrorKind::InvalidModel, "screen size must be positive");
  if (!screens.contains(initial_screen)) {
    throw Error(ErrorKind::InvalidModel, "initial screen '" + initial_screen + "' does not exist");
  }
  const Rect bounds{0, 0, width, height};
  for (const auto& [id, screen] : screens) {
    std::set<int> seen;
    for (const auto& se : screen.elements) {
      const Rect& b = se.element.bbox;
      if (!b.has_positive_area() || b.left < bounds.left || b.top < bounds.top ||
          b.right > bounds.right || b.bottom > bounds.bottom) {
        throw Error(ErrorKind::InvalidModel, "element " + std::to_string(se.element.index) +
                                                 " on screen '" + id + "' has an invalid bbox");
      }
      if (!seen.insert(se.element.index).second) {
        throw Error(ErrorKind::InvalidModel, "duplicate element index on screen '" + id + "'");
      }
    }
    for (const auto& rule : screen.rules) {
      if (rule.target && !screens.contains(*rule.target)) {
        throw Error(ErrorKind::InvalidModel,
                    "rule on screen '" + id + "' targets unknown screen '" + *rule.target + "'");
      }
    }
  }
  if (anchors) {
    std::set<std::string> names;
    for (const auto& a : *anchors) {
      if (a.name.empty() || !names.insert(a.name).second) {
        throw Error(ErrorKind::InvalidModel, "anchors must be non-empty and unique");
      }
    }
  }
}

SimEnvironment::SimEnvironment(SimAppModel model, SimOptions options)
    : model_(std::move(model)), options_(options), instance_(g_next_instance++),
      screen_(model_.initial_screen) {
  model_.validate();
  initial_token_ = encode_state(screen_, vars_);
}

Observation SimEnvironment::observation() {
  Observation o;
  o.screenshot = render(screen_, vars_);
  for (const auto& se : model_.screens.at(screen_).elements) o.elements.push_back(se.element);
  o.source_app = model_.app;
  o.captured_at = steps_;
  return o;
}

void SimEnvironment::step(const Action& action) {
  const auto& screen = model_.screens.at(screen_);
  const auto index = target_index(action);
  const UiElement* element = nullptr;
  if (index) {
    for (const auto& se : screen.elements) {
      if (se.element.index == *index) element = &se.element;
    }
    if (!element) {
      throw Error(ErrorKind::InvalidActionIndex,
                  "no element " + std::to_string(*index) + " on screen '" + screen_ + "'");
    }
  }
  ++steps_;

  if (const auto* open = std::get_if<act::OpenApp>(&action)) {
    if (open->app_name == model_.name || open->app_name == model_.app) {
      screen_ = model_.initial_screen;
    }
    return;
  }
  // Invisible elements cannot be hit; the action is a no-op.
  if (element && !element->visible) return;

  for (const auto& rule : screen.rules) {
    if (!action_matches(rule, action)) continue;
    for (const auto& [key, value] : rule.set) vars_[key] = expand(value, action);
    if (rule.target) screen_ = *rule.target;
    return;
  }
}

std::string SimEnvironment::encode_state(const std::string& screen,
                                         const std::map<std::string, std::string>& vars) const {
  return nlohmann::json{{"instance", instance_}, {"screen", screen}, {"vars", vars}}.dump();
}

EnvState SimEnvironment::get_current_state() { return {model_.app, encode_state(screen_, vars_)}; }

void SimEnvironment::restore_to(const EnvState& state) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(state.token);
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::UnknownState, "malformed state token");
  }
  if (state.app != model_.app || !j.is_object() || j.value("instance", std::uint64_t{0}) != instance_) {
    throw Error(ErrorKind::UnknownState, "state was not produced by this environment");
  }
  const auto screen = j.value("screen", std::string{});
  if (!model_.screens.contains(screen)) throw Error(ErrorKind::UnknownState, "unknown screen in token");
  if (!options_.arbitrary_restore && state.token != initial_token_) {
    throw Error(ErrorKind::RestoreUnsupported, "only the initial snapshot can be restored");
  }
  screen_ = screen;
  vars_ = j.at("vars").get<std::map<std::string, std::string>>();
}

std::vector<ExplorationAnchor> SimEnvironment::app_functions() {
  if (!model_.anchors) {
    throw Error(ErrorKind::AnchorSourceUnavailable, "model declares no anchors");
  }
  return *model_.anchors;
}

Image SimEnvironment::render(const std::string& screen_id,
                             const std::map<std::string, std::string>& vars) const {
  const auto& screen = model_.screens.at(screen_id);
  std::string key = model_.app + "/" + screen_id;
  for (const auto& [k, v] : vars) key += "?" + k + "=" + v;
  std::uint64_t seed = stable_hash(key);

  const Rgb base = screen.background.value_or(hashed_colour(stable_hash("bg:" + key), 170, 250));
  Image image(model_.width, model_.height, base);

  // Coarse wallpaper aligned with the 9x8 hash grid, so distinct screens and
  // distinct variable states hash far apart.
  for (int row = 0; row < 8; ++row) {
    for (int col = 0; col < 9; ++col) {
      const int level = 90 + static_cast<int>(splitmix(seed) % 166);
      const Rect cell{col * model_.width / 9, row * model_.height / 8, (col + 1) * model_.width / 9,
                      (row + 1) * model_.height / 8};
      image.fill(cell, scale(base, level));
    }
  }

  for (const auto& se : screen.elements) {
    if (!se.element.visible) continue;
    const auto& e = se.element;
    Rgb colour;
    if (se.color) {
      colour = *se.color;
    } else if (e.text || e.content_description) {
      colour = hashed_colour(stable_hash("el:" + e.text.value_or("") + "|" + e.content_description.value_or("")),
                             30, 225);
    } else {
      colour = hashed_colour(stable_hash("el:" + screen_id + "#" + std::to_string(e.index)), 30, 225);
    }
    image.fill(e.bbox, darker(colour));
    image.fill({e.bbox.left + 1, e.bbox.top + 1, e.bbox.right - 1, e.bbox.bottom - 1}, colour);
  }
  return image;
}

}  // namespace uiknow
