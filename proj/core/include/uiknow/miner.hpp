#pragma once

#include <atomic>
#include <vector>

#include "uiknow/domain.hpp"
#include "uiknow/gateway.hpp"
#include "uiknow/knowledge.hpp"
#include "uiknow/prompt_template.hpp"
#include "uiknow/vision.hpp"

namespace uiknow {

/// True when the transition must not produce knowledge: the screen did not
/// perceptibly change, or the action touches no element (status, answer, wait).
bool filter_transition(const Transition& transition, int threshold = kDefaultPhashThreshold);

struct MinerStats {
  std::size_t transitions = 0;
  std::size_t filtered = 0;
  std::size_t skipped = 0;
  std::size_t extracted = 0;
};

/// Turns valid transitions into knowledge entries via the mining prompt.
/// Safe to share across threads.
class KnowledgeMiner {
 public:
  KnowledgeMiner(Gateway gateway, const TemplateLibrary& templates, int phash_threshold = kDefaultPhashThreshold);

  /// One entry keyed by the interacted element's patch. Throws
  /// PreconditionViolation for a filtered transition, SkippedNoTarget when the
  /// action names no element; gateway errors propagate.
  std::vector<KnowledgeEntry> extract(const Transition& transition, const Provenance& provenance);

  /// Filters and extracts every consecutive transition; per-transition
  /// failures are logged and skipped.
  std::vector<KnowledgeEntry> mine(const Trajectory& trajectory);

  MinerStats stats() const;

 private:
  Gateway gateway_;
  const PromptTemplate& prompt_;
  int threshold_;
  std::atomic<std::size_t> transitions_{0}, filtered_{0}, skipped_{0}, extracted_{0};
};

}  // namespace uiknow
