#include "uiknow/agent.hpp"

#include <chrono>
#include <set>

#include <spdlog/spdlog.h>

#include "uiknow/error.hpp"
#include "uiknow/ranker.hpp"
#include "uiknow/vision.hpp"

namespace uiknow {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

nlohmann::json RunResult::to_json() const {
  auto actions = nlohmann::json::array();
  for (const auto& s : trajectory.steps) actions.push_back(action_to_json(s.action));
  auto timing = nlohmann::json::array();
  std::size_t comparisons = 0;
  for (const auto& t : timings) {
    comparisons += t.comparisons;
    timing.push_back({{"retrieval_s", t.retrieval_seconds},
                      {"ranking_s", t.ranking_seconds},
                      {"reasoning_s", t.reasoning_seconds},
                      {"comparisons", t.comparisons},
                      {"tips", t.tips}});
  }
  return {{"goal", trajectory.goal},
          {"app", trajectory.app},
          {"status", to_string(status)},
          {"answer", answer ? nlohmann::json(*answer) : nlohmann::json(nullptr)},
          {"env_steps", env_steps},
          {"unparseable", unparseable},
          {"comparisons", comparisons},
          {"actions", std::move(actions)},
          {"timings", std::move(timing)}};
}

Agent::Agent(Gateway gateway, const TemplateLibrary& templates, const KnowledgeStore* store, AgentConfig config)
    : gateway_(std::move(gateway)),
      reasoning_(templates.get(templates::kReasoning)),
      ranker_(templates.get(templates::kKnowledgeRanker)),
      store_(store),
      config_(config) {
  if (!gateway_.chat) throw Error(ErrorKind::InvalidConfig, "agent needs a chat client");
  if (config_.max_steps < 1) throw Error(ErrorKind::InvalidConfig, "max_steps must be >= 1");
}

Guidance Agent::get_guidance(const Observation& obs, const std::string& instruction,
                             const std::vector<Action>& history) {
  Guidance g;
  g.instruction = instruction;
  g.annotated = annotate_screenshot(obs);

  const auto retrieval_start = Clock::now();
  std::vector<std::string> candidates;
  if (store_ && !store_->empty() && gateway_.embedder) {
    try {
      std::set<std::string> seen_ids;
      std::set<std::string> seen_texts;
      for (const auto& element : obs.elements) {
        if (!element.visible) continue;
        const auto probe = gateway_.embedder->embed_image(crop_element(obs.screenshot, element.bbox));
        for (const auto& hit : store_->retrieve(probe, config_.top_k, config_.tau)) {
          if (!seen_ids.insert(hit.entry.id).second) continue;
          g.entry_ids.push_back(hit.entry.id);
          for (const auto& value : hit.entry.values) {
            if (seen_texts.insert(value).second) candidates.push_back(value);
          }
        }
      }
    } catch (const Error& e) {
      spdlog::warn("event=retrieval_failed kind={} message=\"{}\"", to_string(e.kind()), e.what());
      candidates.clear();
      g.entry_ids.clear();
    }
  }
  g.retrieval_seconds = seconds_since(retrieval_start);

  const auto ranking_start = Clock::now();
  if (candidates.size() > 1) {
    LlmComparator comparator(gateway_.chat, ranker_, config_.ranker_retries);
    g.tips = sort_knowledge(std::move(candidates), instruction, comparator);
    g.comparisons = comparator.comparisons();
  } else {
    g.tips = std::move(candidates);
  }
  g.ranking_seconds = seconds_since(ranking_start);

  g.prompt = render_reasoning_prompt(reasoning_, obs, instruction, history, format_tips(g.tips));
  return g;
}

RunResult Agent::run_task(Environment& env, const std::string& instruction) {
  RunResult result;
  result.trajectory.goal = instruction;
  result.trajectory.app = env.app().id;
  result.trajectory.id = "run";
  std::vector<Action> history;

  try {
    for (int idx = 0; idx < config_.max_steps; ++idx) {
      auto obs = env.observation();
      auto guidance = get_guidance(obs, instruction, history);

      const auto reasoning_start = Clock::now();
      const auto decision = decide_action(*gateway_.chat, guidance.prompt, obs, config_.parse_retries);
      result.timings.push_back({guidance.retrieval_seconds, guidance.ranking_seconds, seconds_since(reasoning_start),
                                guidance.comparisons, guidance.tips.size()});
      result.unparseable += static_cast<std::size_t>(decision.unparseable);
      spdlog::info("event=agent_step step={} tips={} comparisons={} action={} retrieval_s={:.4f} ranking_s={:.4f} "
                   "reasoning_s={:.4f}",
                   idx + 1, guidance.tips.size(), guidance.comparisons, to_catalog_json(decision.action),
                   result.timings.back().retrieval_seconds, result.timings.back().ranking_seconds,
                   result.timings.back().reasoning_seconds);

      result.trajectory.steps.push_back({std::move(obs), decision.action});
      history.push_back(decision.action);

      if (const auto* status = std::get_if<act::Status>(&decision.action)) {
        result.status =
            status->goal_status == GoalStatus::Complete ? EpisodeStatus::Complete : EpisodeStatus::Infeasible;
        break;
      }
      if (const auto* answer = std::get_if<act::Answer>(&decision.action)) result.answer = answer->text;

      ++result.env_steps;
      try {
        env.step(decision.action);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvalidActionIndex) throw;
        spdlog::warn("event=invalid_action_index action={}", to_catalog_json(decision.action));
      }
    }
    result.trajectory.final_observation = env.observation();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EnvDisconnected && e.kind() != ErrorKind::ModelTimeout &&
        e.kind() != ErrorKind::ModelRefusal && e.kind() != ErrorKind::ModelRequestRejected) {
      throw;
    }
    spdlog::error("event=run_aborted kind={} message=\"{}\"", to_string(e.kind()), e.what());
    result.status = EpisodeStatus::Aborted;
  }
  result.trajectory.status = result.status;
  return result;
}

}  // namespace uiknow
