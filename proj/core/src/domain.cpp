#include "uiknow/domain.hpp"

#include <algorithm>

#include "uiknow/error.hpp"

namespace uiknow {

const UiElement* Observation::find_element(int index) const {
  auto it = std::find_if(elements.begin(), elements.end(),
                         [index](const UiElement& e) { return e.index == index; });
  return it == elements.end() ? nullptr : &*it;
}

std::string_view to_string(EpisodeStatus status) {
  switch (status) {
    case EpisodeStatus::Complete:
      return "complete";
    case EpisodeStatus::Infeasible:
      return "infeasible";
    case EpisodeStatus::MaxSteps:
      return "max_steps";
    case EpisodeStatus::Aborted:
      return "aborted";
  }
  return "max_steps";
}

EpisodeStatus episode_status_from_string(std::string_view text) {
  if (text == "complete") return EpisodeStatus::Complete;
  if (text == "infeasible") return EpisodeStatus::Infeasible;
  if (text == "max_steps") return EpisodeStatus::MaxSteps;
  if (text == "aborted") return EpisodeStatus::Aborted;
  throw Error(ErrorKind::InvalidDataset, "unknown episode status '" + std::string(text) + "'");
}

const Observation& Trajectory::observation_at(std::size_t i) const {
  if (i < steps.size()) return steps[i].observation;
  if (i == steps.size() && final_observation) return *final_observation;
  throw Error(ErrorKind::OutOfBounds, "trajectory observation index out of range");
}

std::vector<Transition> Trajectory::transitions() const {
  std::vector<Transition> out;
  const auto n = observation_count();
  if (n < 2) return out;
  out.reserve(n - 1);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    Transition tr{steps[t].observation, steps[t].action, observation_at(t + 1), std::nullopt, goal};
    if (auto idx = target_index(tr.action)) {
      if (const auto* element = tr.before.find_element(*idx)) {
        tr.target_element = *element;
      }
    }
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace uiknow
