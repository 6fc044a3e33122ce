#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "uiknow/agent.hpp"
#include "uiknow/domain.hpp"
#include "uiknow/gateway.hpp"
#include "uiknow/knowledge_store.hpp"
#include "uiknow/prompt_template.hpp"

namespace uiknow {

using KeywordGroups = std::vector<std::vector<std::string>>;

struct ScoreResult {
  bool correct = false;
  std::size_t matched = 0;
  std::vector<std::size_t> matched_groups;  // ascending group indices
};

/// Lower-cased, whitespace runs collapsed to one space, trimmed.
std::string normalize_text(std::string_view text);

/// A group matches when any synonym occurs as a normalized substring of the
/// response; correct when at least half the groups match.
/// Throws PreconditionViolation for an empty group list.
ScoreResult score_response(std::string_view response, const KeywordGroups& groups);

enum class KrbSplit { Prior, Dynamic };

std::string_view to_string(KrbSplit split);

struct KrbSample {
  std::string id;
  KrbSplit split = KrbSplit::Prior;
  Image before;
  std::optional<Image> after;
  std::vector<UiElement> a11y_before;
  std::optional<std::vector<UiElement>> a11y_after;
  int element_index = 0;
  std::string task_context;
  KeywordGroups keyword_groups;
  /// Interaction shown to the dynamic prompt; a click on the element when absent.
  std::optional<Action> action;
  std::string app;

  /// Throws InvalidDataset.
  void validate() const;
};

/// JSON-Lines dataset; image paths are relative to the file's directory.
/// Throws InvalidDataset with the offending line number, or Io.
std::vector<KrbSample> load_krb_dataset(const std::filesystem::path& path);

struct SampleVerdict {
  std::size_t index = 0;
  std::string id;
  KrbSplit split = KrbSplit::Prior;
  bool correct = false;
  std::size_t matched = 0;
  std::size_t total = 0;
  std::vector<std::size_t> matched_groups;
  bool gateway_failure = false;
  std::string response;
};

struct EvalReport {
  std::string variant;
  std::size_t n_samples = 0;
  std::size_t n_correct = 0;
  double error_rate = 0.0;
  std::vector<SampleVerdict> verdicts;  // sample order

  nlohmann::json to_json() const;
  std::string to_table() const;
};

struct KrbOptions {
  std::size_t top_k = 3;
  double tau = 0.85;
  int ranker_retries = 2;
  std::size_t jobs = 1;
};

/// Scores every sample under the base prompt (no store), the
/// retrieval-augmented prompt (store, unranked) or retrieval + ranking.
/// Gateway failures mark the sample incorrect and flagged.
/// Throws PreconditionViolation for an empty dataset.
EvalReport run_krb(const std::vector<KrbSample>& dataset, const Gateway& gateway, const TemplateLibrary& templates,
                   const KnowledgeStore* store, bool ranked, const KrbOptions& options = {});

struct CheckedRun {
  std::string app;
  EpisodeStatus status = EpisodeStatus::MaxSteps;
  /// Ground-truth checker verdict on the final state.
  bool verified = false;
};

struct RateStats {
  std::size_t total = 0;
  std::size_t successes = 0;
  double rate = 0.0;
};

struct SuccessStats {
  RateStats overall;
  std::map<std::string, RateStats> per_app;
};

/// A run succeeds when it completed and the checker agrees.
/// Throws EmptyResultSet for no runs.
SuccessStats success_rate(const std::vector<CheckedRun>& runs);

}  // namespace uiknow
