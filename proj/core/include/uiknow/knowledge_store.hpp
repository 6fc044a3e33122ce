#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "uiknow/knowledge.hpp"

namespace uiknow {

struct StoreConfig {
  double delta_k = 0.99;  // key cosine needed to treat two patches as the same element
  double delta_v = 0.1;   // a new value is novel when no stored value is more similar than this
  std::size_t dimension = 1152;

  void validate() const;
};

enum class UpsertKind { Inserted, Merged, Discarded };

std::string_view to_string(UpsertKind kind);

struct UpsertOutcome {
  UpsertKind kind = UpsertKind::Inserted;
  /// Id of the inserted entry, or of the entry merged into / deduplicated against.
  std::string id;
  std::size_t values_added = 0;
};

struct RetrievalHit {
  KnowledgeEntry entry;
  double similarity = 0.0;
};

/// Multimodal knowledge index with merge-or-insert refinement.
///
/// Upsert finds the stored entry whose key is most similar to the new key
/// (ties to the smallest id). Below `delta_k` the entry is inserted. Above it,
/// each new value whose best cosine against the matched entry's values is at
/// most `delta_v` is appended; if none qualifies the entry is discarded as
/// redundant. Values are never removed.
///
/// Readers (retrieve, save, queries) share a lock; upsert is exclusive.
class KnowledgeStore {
 public:
  explicit KnowledgeStore(StoreConfig config = {});
  KnowledgeStore(KnowledgeStore&& other) noexcept;
  KnowledgeStore& operator=(KnowledgeStore&& other) noexcept;

  /// Throws DimensionMismatch or PreconditionViolation for malformed entries.
  UpsertOutcome upsert(KnowledgeEntry entry);

  /// Entries with key cosine >= tau, best first, ties by ascending id.
  std::vector<RetrievalHit> retrieve(const Embedding& probe, std::size_t top_k = 3, double tau = 0.85) const;

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::optional<KnowledgeEntry> get(const std::string& id) const;
  /// Insertion order.
  std::vector<KnowledgeEntry> entries() const;
  std::size_t distinct_value_count() const;
  const StoreConfig& config() const noexcept { return config_; }

  /// `path` is the JSON-Lines file; `<stem>.meta.json` and `<stem>.keys/`
  /// sit next to it. Files are written to temporaries and renamed into place.
  void save(const std::filesystem::path& path) const;
  /// Throws CorruptStore (with line number) or Io.
  static KnowledgeStore load(const std::filesystem::path& path);
  /// Loads `path` when it exists, else an empty store with `config`.
  static KnowledgeStore open(const std::filesystem::path& path, StoreConfig config);

 private:
  void check(const KnowledgeEntry& entry) const;

  StoreConfig config_;
  mutable std::shared_mutex mutex_;
  std::vector<KnowledgeEntry> entries_;
  std::map<std::string, std::size_t> by_id_;
  std::size_t next_serial_ = 0;
};

}  // namespace uiknow
