#include "uiknow/serialization.hpp"

#include <sstream>

#include "uiknow/error.hpp"

namespace uiknow {

void to_json(nlohmann::json& j, const Rect& rect) {
  j = nlohmann::json::array({rect.left, rect.top, rect.right, rect.bottom});
}

void from_json(const nlohmann::json& j, Rect& rect) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(ErrorKind::InvalidDataset, "bbox must be [left, top, right, bottom]");
  }
  rect = {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

void to_json(nlohmann::json& j, const UiElement& e) {
  j = nlohmann::json{{"index", e.index}, {"bbox", e.bbox}, {"clickable", e.clickable}, {"visible", e.visible}};
  if (e.text) j["text"] = *e.text;
  if (e.content_description) j["content_description"] = *e.content_description;
  if (!e.extra_attributes.empty()) j["extra_attributes"] = e.extra_attributes;
}

void from_json(const nlohmann::json& j, UiElement& e) {
  e = UiElement{};
  e.index = j.at("index").get<int>();
  e.bbox = j.at("bbox").get<Rect>();
  e.clickable = j.value("clickable", false);
  e.visible = j.value("visible", true);
  if (auto it = j.find("text"); it != j.end() && !it->is_null()) e.text = it->get<std::string>();
  if (auto it = j.find("content_description"); it != j.end() && !it->is_null()) {
    e.content_description = it->get<std::string>();
  }
  if (auto it = j.find("extra_attributes"); it != j.end() && !it->is_null()) {
    e.extra_attributes = it->get<std::map<std::string, std::string>>();
  }
}

nlohmann::json observation_meta_to_json(const Observation& o) {
  return {{"elements", o.elements}, {"source_app", o.source_app}, {"captured_at", o.captured_at}};
}

Observation observation_from_meta_json(const nlohmann::json& j, Image screenshot) {
  Observation o;
  o.screenshot = std::move(screenshot);
  o.elements = j.value("elements", nlohmann::json::array()).get<std::vector<UiElement>>();
  o.source_app = j.value("source_app", std::string{});
  o.captured_at = j.value("captured_at", std::uint64_t{0});
  return o;
}

nlohmann::json observation_to_json(const Observation& o) {
  auto j = observation_meta_to_json(o);
  j["screenshot"] = base64_encode(encode_png(o.screenshot));
  return j;
}

Observation observation_from_json(const nlohmann::json& j) {
  const auto& b64 = j.at("screenshot").get_ref<const std::string&>();
  return observation_from_meta_json(j, decode_png(base64_decode(b64)));
}

std::string describe_element(const UiElement& e) {
  std::ostringstream out;
  out << "index: " << e.index << "\n";
  if (e.text) out << "text: " << nlohmann::json(*e.text).dump() << "\n";
  if (e.content_description) {
    out << "content_description: " << nlohmann::json(*e.content_description).dump() << "\n";
  }
  for (const auto& [key, value] : e.extra_attributes) {
    out << key << ": " << nlohmann::json(value).dump() << "\n";
  }
  out << "clickable: " << (e.clickable ? "true" : "false") << "\n";
  out << "visible: " << (e.visible ? "true" : "false") << "\n";
  out << "bbox: [" << e.bbox.left << ", " << e.bbox.top << ", " << e.bbox.right << ", "
      << e.bbox.bottom << "]";
  return out.str();
}

std::string describe_elements(const std::vector<UiElement>& elements) {
  if (elements.empty()) return "None";
  std::ostringstream out;
  bool first = true;
  for (const auto& e : elements) {
    if (!first) out << "\n";
    first = false;
    out << "UI element " << e.index << ":";
    if (e.text) out << " text=" << nlohmann::json(*e.text).dump();
    if (e.content_description) {
      out << " content_description=" << nlohmann::json(*e.content_description).dump();
    }
    for (const auto& [key, value] : e.extra_attributes) {
      out << " " << key << "=" << nlohmann::json(value).dump();
    }
    out << " clickable=" << (e.clickable ? "true" : "false")
        << " visible=" << (e.visible ? "true" : "false");
  }
  return out.str();
}

}  // namespace uiknow
