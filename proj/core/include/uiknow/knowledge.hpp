#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "uiknow/gateway.hpp"
#include "uiknow/image.hpp"

namespace uiknow {

/// Where a piece of knowledge was mined: trajectory id and transition index.
struct Provenance {
  std::string trajectory_id;
  std::size_t step = 0;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Visual key (element patch) mapped to operational knowledge texts.
struct KnowledgeEntry {
  std::string id;
  std::string app;
  Image key_patch;
  Embedding key_embedding;
  std::vector<std::string> values;
  std::vector<Embedding> value_embeddings;  // parallel to `values`
  std::vector<Provenance> provenance;
  int merge_count = 0;
  std::string created;
  std::string updated;
};

}  // namespace uiknow
