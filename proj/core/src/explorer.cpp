#include "uiknow/explorer.hpp"

#include <cstdio>
#include <limits>
#include <optional>
#include <regex>
#include <set>

#include <spdlog/spdlog.h>

#include "uiknow/error.hpp"
#include "uiknow/reasoning.hpp"
#include "uiknow/replay_environment.hpp"

namespace uiknow {

namespace {

bool model_failure(ErrorKind kind) {
  return kind == ErrorKind::ModelTimeout || kind == ErrorKind::ModelRefusal ||
         kind == ErrorKind::ModelRequestRejected;
}

}  // namespace

void ExplorationConfig::validate() const {
  if (branching_factor < 1) throw Error(ErrorKind::InvalidConfig, "branching_factor must be >= 1");
  if (max_depth < 0) throw Error(ErrorKind::InvalidConfig, "max_depth must be >= 0");
  if (max_steps < 1) throw Error(ErrorKind::InvalidConfig, "max_steps must be >= 1");
  if (phash_threshold < 0) throw Error(ErrorKind::InvalidConfig, "phash_threshold must be >= 0");
  if (parse_retries < 0) throw Error(ErrorKind::InvalidConfig, "parse_retries must be >= 0");
}

std::vector<std::string> parse_task_list(std::string_view text, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::PreconditionViolation, "k must be positive");
  static const std::regex item(R"(^\s*\d+\s*[.)]\s*(.*?)\s*$)");
  std::vector<std::string> tasks;
  std::size_t start = 0;
  while (start <= text.size() && tasks.size() < k) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string line(text.substr(start, end - start));
    std::smatch m;
    if (std::regex_match(line, m, item) && m[1].length() > 0) tasks.push_back(m[1].str());
    start = end + 1;
  }
  if (tasks.empty()) throw Error(ErrorKind::EmptyTaskList, "model reply contains no numbered tasks");
  return tasks;
}

Explorer::Explorer(std::shared_ptr<ChatClient> chat, const TemplateLibrary& templates, ExplorationConfig config)
    : chat_(std::move(chat)),
      generator_(templates.get(templates::kTaskGoalGenerator)),
      generator_fallback_(templates.get(templates::kTaskGoalGeneratorScreenshotOnly)),
      reasoning_(templates.get(templates::kReasoning)),
      config_(config) {
  config_.validate();
  if (!chat_) throw Error(ErrorKind::InvalidConfig, "explorer needs a chat client");
}

std::vector<std::string> Explorer::generate_tasks(Environment& env, std::size_t k) {
  const auto obs = env.observation();
  const auto app = env.app();
  Bindings bindings{{"app name", app.name}, {"package name", app.id}};
  const PromptTemplate* tmpl = &generator_;
  try {
    std::string activities;
    for (const auto& anchor : env.app_functions()) {
      if (!activities.empty()) activities += '\n';
      activities += anchor.name;
    }
    bindings["activity list"] = activities;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AnchorSourceUnavailable) throw;
    spdlog::info("event=anchors_unavailable app={} fallback=screenshot_only", app.id);
    tmpl = &generator_fallback_;
  }
  const auto reply = chat_->complete(ChatRequest::user(tmpl->render(bindings), {annotate_screenshot(obs)}));

  std::vector<std::string> tasks;
  std::set<std::string> seen;
  for (auto& task : parse_task_list(reply, std::numeric_limits<std::size_t>::max())) {
    if (tasks.size() == k) break;
    if (seen.insert(task).second) tasks.push_back(std::move(task));
  }
  return tasks;
}

Trajectory Explorer::execute_task(Environment& env, const std::string& task, int max_steps) {
  if (max_steps < 1) throw Error(ErrorKind::PreconditionViolation, "max_steps must be >= 1");
  return run(env, task, max_steps);
}

Trajectory Explorer::run(Environment& env, const std::string& task, int max_steps) {
  Trajectory traj;
  traj.goal = task;
  traj.app = env.app().id;
  traj.status = EpisodeStatus::MaxSteps;
  std::vector<Action> history;
  try {
    for (int round = 0; round < max_steps; ++round) {
      auto obs = env.observation();
      const auto prompt = render_reasoning_prompt(reasoning_, obs, task, history, "");
      const auto decision = decide_action(*chat_, prompt, obs, config_.parse_retries);
      unparseable_ += static_cast<std::size_t>(decision.unparseable);
      traj.steps.push_back({std::move(obs), decision.action});
      history.push_back(decision.action);
      if (const auto* status = std::get_if<act::Status>(&decision.action)) {
        traj.status = status->goal_status == GoalStatus::Complete ? EpisodeStatus::Complete
                                                                   : EpisodeStatus::Infeasible;
        break;
      }
      try {
        env.step(decision.action);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvalidActionIndex) throw;
        spdlog::warn("event=invalid_action_index task=\"{}\" action={}", task, to_catalog_json(decision.action));
      }
    }
    traj.final_observation = env.observation();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EnvDisconnected && !model_failure(e.kind())) throw;
    spdlog::error("event=branch_aborted task=\"{}\" kind={} message=\"{}\"", task, to_string(e.kind()), e.what());
    traj.status = EpisodeStatus::Aborted;
  }
  return traj;
}

void Explorer::dfs(Environment& env, const std::string& task, int depth, const std::string* parent, int sibling,
                   std::vector<Trajectory>& out) {
  char id[32];
  std::snprintf(id, sizeof id, "traj_%04zu", next_id_++);
  auto traj = run(env, task, config_.max_steps);
  traj.id = id;
  traj.depth = depth;
  traj.sibling_index = sibling;
  if (parent) traj.parent_id = *parent;
  const auto status = traj.status;
  spdlog::info("event=trajectory id={} depth={} sibling={} steps={} status={}", traj.id, depth, sibling,
               traj.steps.size(), to_string(status));
  if (on_trajectory) on_trajectory(traj);
  out.push_back(std::move(traj));
  const std::string self = id;

  if (status == EpisodeStatus::Aborted || depth >= config_.max_depth) return;

  std::vector<std::string> children;
  EnvState state;
  try {
    state = env.get_current_state();
    children = generate_tasks(env, static_cast<std::size_t>(config_.branching_factor));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyTaskList && e.kind() != ErrorKind::EnvDisconnected && !model_failure(e.kind())) {
      throw;
    }
    spdlog::warn("event=expansion_failed parent={} kind={}", self, to_string(e.kind()));
    return;
  }
  for (std::size_t i = 0; i < children.size(); ++i) {
    // Sibling 0 continues from the parent's terminal state; the rest roll back to it.
    if (i > 0) {
      try {
        env.restore_to(state);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::EnvDisconnected) throw;
        spdlog::error("event=restore_failed parent={} sibling={}", self, i);
        return;
      }
    }
    dfs(env, children[i], depth + 1, &self, static_cast<int>(i), out);
  }
}

std::vector<Trajectory> Explorer::explore(Environment& env) {
  next_id_ = 0;
  std::optional<PrefixReplayEnvironment> replay;
  Environment* target = &env;
  if (!env.capabilities().arbitrary_restore) {
    replay.emplace(env);
    target = &*replay;
  }
  const auto initial = target->get_current_state();
  const auto tasks = generate_tasks(*target, static_cast<std::size_t>(config_.branching_factor));

  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    dfs(*target, tasks[i], 0, nullptr, static_cast<int>(i), out);
    try {
      target->restore_to(initial);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EnvDisconnected) throw;
      spdlog::error("event=restore_failed branch={}", i);
    }
  }
  return out;
}

}  // namespace uiknow
