#include "uiknow/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "uiknow/error.hpp"
#include "uiknow/ranker.hpp"
#include "uiknow/serialization.hpp"
#include "uiknow/vision.hpp"

namespace uiknow {

namespace fs = std::filesystem;

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

ScoreResult score_response(std::string_view response, const KeywordGroups& groups) {
  if (groups.empty()) throw Error(ErrorKind::PreconditionViolation, "at least one keyword group is required");
  const auto haystack = normalize_text(response);
  ScoreResult result;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const auto& synonym : groups[g]) {
      const auto needle = normalize_text(synonym);
      if (!needle.empty() && haystack.find(needle) != std::string::npos) {
        result.matched_groups.push_back(g);
        break;
      }
    }
  }
  result.matched = result.matched_groups.size();
  // matched / total >= 1/2, in integers.
  result.correct = 2 * result.matched >= groups.size();
  return result;
}

std::string_view to_string(KrbSplit split) { return split == KrbSplit::Prior ? "prior" : "dynamic"; }

void KrbSample::validate() const {
  auto fail = [&](const std::string& why) { throw Error(ErrorKind::InvalidDataset, "sample '" + id + "': " + why); };
  if (keyword_groups.empty()) fail("no keyword groups");
  for (const auto& g : keyword_groups) {
    if (g.empty()) fail("empty keyword group");
  }
  if (before.empty()) fail("missing before image");
  if (split == KrbSplit::Dynamic && (!after || after->empty())) fail("dynamic sample without after image");
  const bool found = std::any_of(a11y_before.begin(), a11y_before.end(),
                                 [&](const UiElement& e) { return e.index == element_index; });
  if (!found) fail("element " + std::to_string(element_index) + " is not in the accessibility tree");
}

std::vector<KrbSample> load_krb_dataset(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  const auto base = path.parent_path();
  std::vector<KrbSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      KrbSample s;
      s.id = j.value("id", "sample_" + std::to_string(line_no));
      const auto split = j.at("split").get<std::string>();
      if (split == "prior") {
        s.split = KrbSplit::Prior;
      } else if (split == "dynamic") {
        s.split = KrbSplit::Dynamic;
      } else {
        throw Error(ErrorKind::InvalidDataset, "unknown split '" + split + "'");
      }
      s.before = read_png(base / j.at("before_image").get<std::string>());
      if (j.contains("after_image") && !j["after_image"].is_null()) {
        s.after = read_png(base / j["after_image"].get<std::string>());
      }
      s.a11y_before = j.at("a11y_before").get<std::vector<UiElement>>();
      if (j.contains("a11y_after") && !j["a11y_after"].is_null()) {
        s.a11y_after = j["a11y_after"].get<std::vector<UiElement>>();
      }
      s.element_index = j.at("element_index").get<int>();
      s.task_context = j.at("task_context").get<std::string>();
      s.keyword_groups = j.at("keyword_groups").get<KeywordGroups>();
      if (j.contains("action") && !j["action"].is_null()) s.action = action_from_json(j["action"]);
      s.app = j.value("app", std::string{});
      s.validate();
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidDataset, where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidDataset, where + ": " + e.what());
    }
  }
  return out;
}

nlohmann::json EvalReport::to_json() const {
  auto samples = nlohmann::json::array();
  for (const auto& v : verdicts) {
    samples.push_back({{"index", v.index},
                       {"id", v.id},
                       {"split", to_string(v.split)},
                       {"correct", v.correct},
                       {"matched", v.matched},
                       {"total", v.total},
                       {"matched_groups", v.matched_groups},
                       {"gateway_failure", v.gateway_failure},
                       {"response", v.response}});
  }
  return {{"variant", variant},
          {"n_samples", n_samples},
          {"n_correct", n_correct},
          {"error_rate", error_rate},
          {"samples", std::move(samples)}};
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "variant=%s samples=%zu correct=%zu error_rate=%.4f\n", variant.c_str(), n_samples,
                n_correct, error_rate);
  out << line;
  out << "  #  id                    split    matched  verdict\n";
  for (const auto& v : verdicts) {
    std::snprintf(line, sizeof line, "%3zu  %-20.20s  %-7s  %3zu/%-3zu  %s%s\n", v.index, v.id.c_str(),
                  std::string(to_string(v.split)).c_str(), v.matched, v.total, v.correct ? "correct" : "wrong",
                  v.gateway_failure ? " (gateway failure)" : "");
    out << line;
  }
  return out.str();
}

namespace {

std::string_view pick_template(KrbSplit split, bool with_store, bool ranked) {
  if (split == KrbSplit::Prior) {
    if (!with_store) return templates::kKrbPrior;
    return ranked ? templates::kKrbPriorRanked : templates::kKrbPriorRetrieval;
  }
  if (!with_store) return templates::kKrbDynamic;
  return ranked ? templates::kKrbDynamicRanked : templates::kKrbDynamicRetrieval;
}

SampleVerdict evaluate_one(std::size_t index, const KrbSample& s, const Gateway& gateway,
                           const TemplateLibrary& templates, const KnowledgeStore* store, bool ranked,
                           const KrbOptions& options) {
  SampleVerdict v;
  v.index = index;
  v.id = s.id;
  v.split = s.split;
  v.total = s.keyword_groups.size();

  const auto& element = *std::find_if(s.a11y_before.begin(), s.a11y_before.end(),
                                      [&](const UiElement& e) { return e.index == s.element_index; });
  const Observation before{s.before, s.a11y_before, s.app, 0};
  const Action action = s.action ? *s.action : Action{act::Click{s.element_index}};
  Bindings bindings{{"numeric tag of element", std::to_string(s.element_index)},
                    {"task description", s.task_context},
                    {"ui element attributes", describe_element(element)},
                    {"action", to_catalog_json(action)}};
  try {
    if (store) {
      std::vector<std::string> similar;
      std::set<std::string> seen;
      const auto probe = gateway.embedder->embed_image(crop_element(s.before, element.bbox));
      for (const auto& hit : store->retrieve(probe, options.top_k, options.tau)) {
        for (const auto& value : hit.entry.values) {
          if (seen.insert(value).second) similar.push_back(value);
        }
      }
      if (ranked && similar.size() > 1) {
        LlmComparator comparator(gateway.chat, templates.get(templates::kKnowledgeRanker), options.ranker_retries);
        similar = sort_knowledge(std::move(similar), s.task_context, comparator);
      }
      bindings["similar element functionalities"] = similar.empty() ? "None" : format_tips(similar);
    }
    std::vector<Image> images{annotate_screenshot(before)};
    if (s.split == KrbSplit::Dynamic) {
      const Observation after{*s.after, s.a11y_after.value_or(std::vector<UiElement>{}), s.app, 1};
      images.push_back(annotate_screenshot(after));
    }
    const auto& tmpl = templates.get(pick_template(s.split, store != nullptr, ranked));
    v.response = gateway.chat->complete(ChatRequest::user(tmpl.render(bindings), images));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::TemplateNotFound || e.kind() == ErrorKind::MissingPlaceholder) throw;
    spdlog::warn("event=krb_sample_failed sample={} kind={}", s.id, to_string(e.kind()));
    v.gateway_failure = true;
    return v;
  }
  const auto score = score_response(v.response, s.keyword_groups);
  v.correct = score.correct;
  v.matched = score.matched;
  v.matched_groups = score.matched_groups;
  return v;
}

}  // namespace

EvalReport run_krb(const std::vector<KrbSample>& dataset, const Gateway& gateway, const TemplateLibrary& templates,
                   const KnowledgeStore* store, bool ranked, const KrbOptions& options) {
  if (dataset.empty()) throw Error(ErrorKind::PreconditionViolation, "dataset is empty");
  if (!gateway.chat || (store && !gateway.embedder)) {
    throw Error(ErrorKind::InvalidConfig, "evaluation needs a chat client and, with a store, an embedder");
  }
  for (const auto& s : dataset) s.validate();

  EvalReport report;
  report.variant = store ? (ranked ? "ranked" : "retrieval") : "base";
  report.verdicts.resize(dataset.size());

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < dataset.size(); i = next++) {
        report.verdicts[i] = evaluate_one(i, dataset[i], gateway, templates, store, ranked, options);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = dataset.size();
    }
  };
  const auto jobs = std::clamp<std::size_t>(options.jobs, 1, dataset.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  report.n_samples = dataset.size();
  for (const auto& v : report.verdicts) report.n_correct += v.correct ? 1 : 0;
  report.error_rate = 1.0 - static_cast<double>(report.n_correct) / static_cast<double>(report.n_samples);
  return report;
}

SuccessStats success_rate(const std::vector<CheckedRun>& runs) {
  if (runs.empty()) throw Error(ErrorKind::EmptyResultSet, "no runs to aggregate");
  SuccessStats stats;
  for (const auto& r : runs) {
    const bool ok = r.status == EpisodeStatus::Complete && r.verified;
    auto& app = stats.per_app[r.app];
    ++app.total;
    ++stats.overall.total;
    if (ok) {
      ++app.successes;
      ++stats.overall.successes;
    }
  }
  auto finish = [](RateStats& s) { s.rate = static_cast<double>(s.successes) / static_cast<double>(s.total); };
  finish(stats.overall);
  for (auto& [_, s] : stats.per_app) finish(s);
  return stats;
}

}  // namespace uiknow
