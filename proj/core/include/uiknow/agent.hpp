#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uiknow/domain.hpp"
#include "uiknow/environment.hpp"
#include "uiknow/gateway.hpp"
#include "uiknow/knowledge_store.hpp"
#include "uiknow/prompt_template.hpp"
#include "uiknow/reasoning.hpp"

namespace uiknow {

struct AgentConfig {
  int max_steps = 30;
  std::size_t top_k = 3;
  double tau = 0.85;
  int parse_retries = 2;
  int ranker_retries = 2;
};

/// Per-step knowledge block plus the reasoning prompt it was rendered into.
struct Guidance {
  std::string instruction;
  std::vector<std::string> tips;  // ranked, most useful first
  Image annotated;
  std::string prompt;
  std::vector<std::string> entry_ids;  // retrieved entries, first-seen order
  double retrieval_seconds = 0.0;
  double ranking_seconds = 0.0;
  std::size_t comparisons = 0;
};

struct StepTiming {
  double retrieval_seconds = 0.0;
  double ranking_seconds = 0.0;
  double reasoning_seconds = 0.0;
  std::size_t comparisons = 0;
  std::size_t tips = 0;
};

struct RunResult {
  Trajectory trajectory;
  EpisodeStatus status = EpisodeStatus::MaxSteps;
  std::optional<std::string> answer;
  std::vector<StepTiming> timings;
  std::size_t env_steps = 0;
  std::size_t unparseable = 0;

  nlohmann::json to_json() const;
};

/// Knowledge-guided executor. `store` may be null, which behaves as an empty store.
class Agent {
 public:
  Agent(Gateway gateway, const TemplateLibrary& templates, const KnowledgeStore* store, AgentConfig config = {});

  /// Retrieves knowledge for every visible element, ranks all retrieved values
  /// for `instruction` and renders the reasoning prompt. Store and gateway
  /// failures leave the tips empty.
  Guidance get_guidance(const Observation& observation, const std::string& instruction,
                        const std::vector<Action>& history = {});

  RunResult run_task(Environment& env, const std::string& instruction);

  const AgentConfig& config() const noexcept { return config_; }

 private:
  Gateway gateway_;
  const PromptTemplate& reasoning_;
  const PromptTemplate& ranker_;
  const KnowledgeStore* store_;
  AgentConfig config_;
};

}  // namespace uiknow
