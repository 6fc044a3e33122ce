#include "uiknow/miner.hpp"

#include <spdlog/spdlog.h>

#include "uiknow/error.hpp"
#include "uiknow/serialization.hpp"

namespace uiknow {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

bool filter_transition(const Transition& t, int threshold) {
  if (!is_interactive(t.action)) return true;
  return observations_equal(t.before, t.after, threshold);
}

KnowledgeMiner::KnowledgeMiner(Gateway gateway, const TemplateLibrary& templates, int phash_threshold)
    : gateway_(std::move(gateway)), prompt_(templates.get(templates::kKnowledgeMining)), threshold_(phash_threshold) {
  if (!gateway_.chat || !gateway_.embedder) throw Error(ErrorKind::InvalidConfig, "miner needs chat and embedder");
}

std::vector<KnowledgeEntry> KnowledgeMiner::extract(const Transition& t, const Provenance& provenance) {
  if (filter_transition(t, threshold_)) {
    throw Error(ErrorKind::PreconditionViolation, "transition is filtered and yields no knowledge");
  }
  if (!target_index(t.action)) {
    throw Error(ErrorKind::SkippedNoTarget, std::string(action_type(t.action)) + " touches no element");
  }
  if (!t.target_element) {
    throw Error(ErrorKind::PreconditionViolation, "index-bearing action without a resolved target element");
  }
  const auto& element = *t.target_element;

  const auto prompt = prompt_.render({{"numeric tag of element", std::to_string(element.index)},
                                      {"task description", t.task_context},
                                      {"action", to_catalog_json(t.action)},
                                      {"ui element attributes", describe_element(element)}});
  auto value = trim(gateway_.chat->complete(
      ChatRequest::user(prompt, {annotate_screenshot(t.before), annotate_screenshot(t.after)})));
  if (value.empty()) throw Error(ErrorKind::ModelRefusal, "empty knowledge description");

  KnowledgeEntry entry;
  entry.id = provenance.trajectory_id + "#" + std::to_string(provenance.step);
  entry.app = t.before.source_app;
  entry.key_patch = crop_element(t.before.screenshot, element.bbox);
  entry.key_embedding = gateway_.embedder->embed_image(entry.key_patch);
  entry.value_embeddings.push_back(gateway_.embedder->embed_text(value));
  entry.values.push_back(std::move(value));
  entry.provenance.push_back(provenance);

  std::vector<KnowledgeEntry> out;
  out.push_back(std::move(entry));
  return out;
}

std::vector<KnowledgeEntry> KnowledgeMiner::mine(const Trajectory& trajectory) {
  std::vector<KnowledgeEntry> out;
  const auto transitions = trajectory.transitions();
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    ++transitions_;
    const auto& t = transitions[i];
    if (filter_transition(t, threshold_)) {
      ++filtered_;
      continue;
    }
    try {
      for (auto& e : extract(t, {trajectory.id, i})) out.push_back(std::move(e));
      ++extracted_;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ScriptExhausted) throw;
      ++skipped_;
      auto level = e.kind() == ErrorKind::SkippedNoTarget ? spdlog::level::debug : spdlog::level::warn;
      spdlog::log(level, "event=transition_skipped trajectory={} step={} kind={}", trajectory.id, i,
                  to_string(e.kind()));
    }
  }
  return out;
}

MinerStats KnowledgeMiner::stats() const { return {transitions_, filtered_, skipped_, extracted_}; }

}  // namespace uiknow
