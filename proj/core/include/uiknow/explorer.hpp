#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "uiknow/domain.hpp"
#include "uiknow/environment.hpp"
#include "uiknow/gateway.hpp"
#include "uiknow/prompt_template.hpp"
#include "uiknow/vision.hpp"

namespace uiknow {

struct ExplorationConfig {
  int branching_factor = 10;
  /// A node at recursion depth q expands children iff q < max_depth.
  int max_depth = 5;
  int max_steps = 30;
  int phash_threshold = kDefaultPhashThreshold;
  /// Extra attempts for an unparseable reply before recording Wait.
  int parse_retries = 2;

  /// Throws InvalidConfig.
  void validate() const;
};

/// Numbered list items (`1. foo`, `2) bar`) with numbering stripped, at most
/// `k` of them. Throws EmptyTaskList when nothing parses.
std::vector<std::string> parse_task_list(std::string_view text, std::size_t k);

/// Anchor-guided task generation plus depth-first exploration with
/// snapshot/restore between siblings.
class Explorer {
 public:
  Explorer(std::shared_ptr<ChatClient> chat, const TemplateLibrary& templates, ExplorationConfig config);

  /// Renders the task-generator prompt for the current screen (screenshot-only
  /// variant when the app exposes no anchors) and returns up to `k` distinct tasks.
  std::vector<std::string> generate_tasks(Environment& env, std::size_t k);

  /// Runs one task for at most `max_steps` rounds without knowledge.
  Trajectory execute_task(Environment& env, const std::string& task, int max_steps);

  /// Whole exploration tree. Environments without arbitrary restore are
  /// wrapped in prefix replay. Trajectory ids are `traj_NNNN` in execution order.
  std::vector<Trajectory> explore(Environment& env);

  /// Called after each trajectory is recorded, e.g. to persist it.
  std::function<void(const Trajectory&)> on_trajectory;

  const ExplorationConfig& config() const noexcept { return config_; }
  std::size_t unparseable_replies() const noexcept { return unparseable_; }

 private:
  void dfs(Environment& env, const std::string& task, int depth, const std::string* parent, int sibling,
           std::vector<Trajectory>& out);
  Trajectory run(Environment& env, const std::string& task, int max_steps);

  std::shared_ptr<ChatClient> chat_;
  const PromptTemplate& generator_;
  const PromptTemplate& generator_fallback_;
  const PromptTemplate& reasoning_;
  ExplorationConfig config_;
  std::size_t next_id_ = 0;
  std::atomic<std::size_t> unparseable_{0};
};

}  // namespace uiknow
