#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uiknow/domain.hpp"

namespace uiknow {

void to_json(nlohmann::json& j, const Rect& rect);
void from_json(const nlohmann::json& j, Rect& rect);

void to_json(nlohmann::json& j, const UiElement& element);
void from_json(const nlohmann::json& j, UiElement& element);

/// Observation with its screenshot inlined as base64 PNG.
nlohmann::json observation_to_json(const Observation& observation);
Observation observation_from_json(const nlohmann::json& j);

/// Observation metadata only (elements, app, step counter); the screenshot
/// travels separately, e.g. as a PNG file next to the record.
nlohmann::json observation_meta_to_json(const Observation& observation);
Observation observation_from_meta_json(const nlohmann::json& j, Image screenshot);

/// Attribute block for one element as shown to the model.
std::string describe_element(const UiElement& element);

/// One line per element, used for the reasoning prompt's element list.
std::string describe_elements(const std::vector<UiElement>& elements);

}  // namespace uiknow
