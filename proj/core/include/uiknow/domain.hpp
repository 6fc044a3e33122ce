#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uiknow/action.hpp"
#include "uiknow/image.hpp"

namespace uiknow {

/// One accessibility-tree node, labelled on screen by `index` (Set-of-Mark).
struct UiElement {
  int index = 0;
  Rect bbox;
  std::optional<std::string> text;
  std::optional<std::string> content_description;
  bool clickable = false;
  bool visible = true;
  std::map<std::string, std::string> extra_attributes;

  friend bool operator==(const UiElement&, const UiElement&) = default;
};

struct Observation {
  Image screenshot;
  std::vector<UiElement> elements;
  std::string source_app;
  std::uint64_t captured_at = 0;

  const UiElement* find_element(int index) const;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// The (before, action, after) triple knowledge is mined from.
struct Transition {
  Observation before;
  Action action;
  Observation after;
  std::optional<UiElement> target_element;
  std::string task_context;
};

struct TrajectoryStep {
  Observation observation;
  Action action;
};

/// Why an episode ended.
enum class EpisodeStatus { Complete, Infeasible, MaxSteps, Aborted };

std::string_view to_string(EpisodeStatus status);
EpisodeStatus episode_status_from_string(std::string_view text);

struct Trajectory {
  std::string id;
  std::string goal;
  std::string app;
  std::vector<TrajectoryStep> steps;
  std::optional<Observation> final_observation;
  EpisodeStatus status = EpisodeStatus::MaxSteps;

  // Position in the exploration tree; empty parent for top-level branches.
  std::optional<std::string> parent_id;
  int depth = 0;
  int sibling_index = 0;

  /// |ξ|: number of recorded observations.
  std::size_t observation_count() const noexcept {
    return steps.size() + (final_observation ? 1 : 0);
  }
  const Observation& observation_at(std::size_t i) const;

  /// Consecutive (o_t, a_t, o_{t+1}) triples; the target element is resolved
  /// from o_t when the action carries an index.
  std::vector<Transition> transitions() const;
};

}  // namespace uiknow
