#include "uiknow/knowledge_store.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>

#include <nlohmann/json.hpp>
#include <unistd.h>

#include "uiknow/error.hpp"

namespace uiknow {

namespace fs = std::filesystem;

namespace {

constexpr int kFormatVersion = 1;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path sidecar(const fs::path& path, const std::string& suffix) {
  return path.parent_path() / (path.stem().string() + suffix);
}

std::string key_file(std::size_t i) {
  char name[32];
  std::snprintf(name, sizeof name, "key_%06zu.png", i);
  return name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

}  // namespace

std::string_view to_string(UpsertKind kind) {
  switch (kind) {
    case UpsertKind::Inserted:
      return "inserted";
    case UpsertKind::Merged:
      return "merged";
    case UpsertKind::Discarded:
      return "discarded";
  }
  return "?";
}

void StoreConfig::validate() const {
  auto in_range = [](double v) { return std::isfinite(v) && v >= -1.0 && v <= 1.0; };
  if (!in_range(delta_k)) throw Error(ErrorKind::InvalidConfig, "delta_k must lie in [-1, 1]");
  if (!in_range(delta_v)) throw Error(ErrorKind::InvalidConfig, "delta_v must lie in [-1, 1]");
  if (dimension == 0) throw Error(ErrorKind::InvalidConfig, "embedding dimension must be positive");
}

KnowledgeStore::KnowledgeStore(StoreConfig config) : config_(config) { config_.validate(); }

KnowledgeStore::KnowledgeStore(KnowledgeStore&& other) noexcept {
  std::unique_lock lock(other.mutex_);
  config_ = other.config_;
  entries_ = std::move(other.entries_);
  by_id_ = std::move(other.by_id_);
  next_serial_ = other.next_serial_;
}

KnowledgeStore& KnowledgeStore::operator=(KnowledgeStore&& other) noexcept {
  if (this != &other) {
    std::scoped_lock lock(mutex_, other.mutex_);
    config_ = other.config_;
    entries_ = std::move(other.entries_);
    by_id_ = std::move(other.by_id_);
    next_serial_ = other.next_serial_;
  }
  return *this;
}

void KnowledgeStore::check(const KnowledgeEntry& e) const {
  auto dim = [&](const Embedding& emb, const char* what) {
    if (emb.dimension() != config_.dimension) {
      throw Error(ErrorKind::DimensionMismatch, std::string(what) + " has dimension " +
                                                    std::to_string(emb.dimension()) + ", store uses " +
                                                    std::to_string(config_.dimension));
    }
  };
  dim(e.key_embedding, "key embedding");
  double norm = 0.0;
  for (double v : e.key_embedding.values) norm += v * v;
  if (std::abs(std::sqrt(norm) - 1.0) > 1e-6) {
    throw Error(ErrorKind::PreconditionViolation, "key embedding is not unit-norm");
  }
  if (e.values.empty()) throw Error(ErrorKind::PreconditionViolation, "entry has no values");
  if (e.values.size() != e.value_embeddings.size()) {
    throw Error(ErrorKind::PreconditionViolation, "values and value embeddings differ in length");
  }
  for (const auto& v : e.value_embeddings) dim(v, "value embedding");
}

UpsertOutcome KnowledgeStore::upsert(KnowledgeEntry entry) {
  check(entry);
  std::unique_lock lock(mutex_);

  KnowledgeEntry* match = nullptr;
  double best = 0.0;
  for (auto& e : entries_) {
    const double c = cosine(entry.key_embedding, e.key_embedding);
    if (c < config_.delta_k) continue;
    if (!match || c > best || (c == best && e.id < match->id)) {
      match = &e;
      best = c;
    }
  }

  const auto now = utc_now();
  if (!match) {
    if (entry.id.empty() || by_id_.contains(entry.id)) {
      char id[32];
      do {
        std::snprintf(id, sizeof id, "k%06zu", next_serial_++);
      } while (by_id_.contains(id));
      entry.id = id;
    }
    if (entry.created.empty()) entry.created = now;
    entry.updated = now;
    by_id_[entry.id] = entries_.size();
    entries_.push_back(std::move(entry));
    return {UpsertKind::Inserted, entries_.back().id, entries_.back().values.size()};
  }

  std::size_t added = 0;
  for (std::size_t j = 0; j < entry.values.size(); ++j) {
    double closest = -1.0;
    for (const auto& old : match->value_embeddings) closest = std::max(closest, cosine(entry.value_embeddings[j], old));
    if (closest <= config_.delta_v) {
      match->values.push_back(entry.values[j]);
      match->value_embeddings.push_back(entry.value_embeddings[j]);
      ++added;
    }
  }
  if (added == 0) return {UpsertKind::Discarded, match->id, 0};
  ++match->merge_count;
  match->provenance.insert(match->provenance.end(), entry.provenance.begin(), entry.provenance.end());
  match->updated = now;
  return {UpsertKind::Merged, match->id, added};
}

std::vector<RetrievalHit> KnowledgeStore::retrieve(const Embedding& probe, std::size_t top_k, double tau) const {
  if (probe.dimension() != config_.dimension) {
    throw Error(ErrorKind::DimensionMismatch, "probe has dimension " + std::to_string(probe.dimension()));
  }
  std::shared_lock lock(mutex_);
  std::vector<std::pair<double, const KnowledgeEntry*>> scored;
  for (const auto& e : entries_) {
    const double c = cosine(probe, e.key_embedding);
    if (c >= tau) scored.emplace_back(c, &e);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->id < b.second->id;
  });
  if (scored.size() > top_k) scored.resize(top_k);
  std::vector<RetrievalHit> hits;
  hits.reserve(scored.size());
  for (const auto& [sim, e] : scored) hits.push_back({*e, sim});
  return hits;
}

std::size_t KnowledgeStore::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::optional<KnowledgeEntry> KnowledgeStore::get(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return entries_[it->second];
}

std::vector<KnowledgeEntry> KnowledgeStore::entries() const {
  std::shared_lock lock(mutex_);
  return entries_;
}

std::size_t KnowledgeStore::distinct_value_count() const {
  std::shared_lock lock(mutex_);
  std::set<std::string_view> distinct;
  for (const auto& e : entries_) distinct.insert(e.values.begin(), e.values.end());
  return distinct.size();
}

void KnowledgeStore::save(const fs::path& path) const {
  std::shared_lock lock(mutex_);
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  const auto tag = ".tmp" + std::to_string(::getpid());
  const auto keys_dir = sidecar(path, ".keys");
  const auto keys_tmp = sidecar(path, ".keys" + tag);
  const auto meta_path = sidecar(path, ".meta.json");
  fs::remove_all(keys_tmp);
  fs::create_directories(keys_tmp);

  std::string lines;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    write_png(e.key_patch, keys_tmp / key_file(i));
    auto values = nlohmann::json::array();
    for (const auto& v : e.value_embeddings) values.push_back(v.values);
    auto provenance = nlohmann::json::array();
    for (const auto& p : e.provenance) provenance.push_back({{"trajectory", p.trajectory_id}, {"step", p.step}});
    nlohmann::json rec{{"id", e.id},
                       {"app", e.app},
                       {"key_image", (keys_dir.filename() / key_file(i)).generic_string()},
                       {"key_embedding", e.key_embedding.values},
                       {"values", e.values},
                       {"value_embeddings", std::move(values)},
                       {"provenance", std::move(provenance)},
                       {"merge_count", e.merge_count},
                       {"created", e.created},
                       {"updated", e.updated}};
    lines += rec.dump();
    lines += '\n';
  }
  const nlohmann::json meta{{"version", kFormatVersion},
                            {"dimension", config_.dimension},
                            {"delta_k", config_.delta_k},
                            {"delta_v", config_.delta_v},
                            {"entries", entries_.size()}};
  const fs::path lines_tmp = path.string() + tag;
  const fs::path meta_tmp = meta_path.string() + tag;
  write_text(lines_tmp, lines);
  write_text(meta_tmp, meta.dump(2) + "\n");

  fs::remove_all(keys_dir);
  fs::rename(keys_tmp, keys_dir);
  fs::rename(meta_tmp, meta_path);
  fs::rename(lines_tmp, path);
}

KnowledgeStore KnowledgeStore::load(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::Io, "no store at " + path.string());
  const auto meta_path = sidecar(path, ".meta.json");
  std::ifstream meta_in(meta_path);
  if (!meta_in) throw Error(ErrorKind::CorruptStore, "missing metadata file " + meta_path.string());
  StoreConfig config;
  std::size_t expected = 0;
  try {
    const auto meta = nlohmann::json::parse(meta_in);
    if (meta.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorKind::CorruptStore, "unsupported store version in " + meta_path.string());
    }
    config.dimension = meta.at("dimension").get<std::size_t>();
    config.delta_k = meta.at("delta_k").get<double>();
    config.delta_v = meta.at("delta_v").get<double>();
    expected = meta.at("entries").get<std::size_t>();
    config.validate();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptStore, meta_path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CorruptStore) throw;
    throw Error(ErrorKind::CorruptStore, meta_path.string() + ": " + e.what());
  }

  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  KnowledgeStore store(config);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto where = path.string() + ":" + std::to_string(line_no);
    try {
      const auto rec = nlohmann::json::parse(line);
      KnowledgeEntry e;
      e.id = rec.at("id").get<std::string>();
      e.app = rec.at("app").get<std::string>();
      e.key_patch = read_png(path.parent_path() / rec.at("key_image").get<std::string>());
      e.key_embedding = {rec.at("key_embedding").get<std::vector<double>>(), true};
      e.values = rec.at("values").get<std::vector<std::string>>();
      for (const auto& v : rec.at("value_embeddings")) e.value_embeddings.push_back({v.get<std::vector<double>>(), true});
      for (const auto& p : rec.at("provenance")) {
        e.provenance.push_back({p.at("trajectory").get<std::string>(), p.at("step").get<std::size_t>()});
      }
      e.merge_count = rec.at("merge_count").get<int>();
      e.created = rec.at("created").get<std::string>();
      e.updated = rec.at("updated").get<std::string>();
      store.check(e);
      if (e.id.empty() || store.by_id_.contains(e.id)) throw Error(ErrorKind::CorruptStore, "duplicate or empty id");
      store.by_id_[e.id] = store.entries_.size();
      store.entries_.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::CorruptStore, where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::CorruptStore, where + ": " + e.what());
    }
  }
  if (store.entries_.size() != expected) {
    throw Error(ErrorKind::CorruptStore, path.string() + ":" + std::to_string(line_no + 1) + ": expected " +
                                             std::to_string(expected) + " entries, found " +
                                             std::to_string(store.entries_.size()));
  }
  store.next_serial_ = store.entries_.size();
  return store;
}

KnowledgeStore KnowledgeStore::open(const fs::path& path, StoreConfig config) {
  if (fs::exists(path)) return load(path);
  return KnowledgeStore(config);
}

}  // namespace uiknow
