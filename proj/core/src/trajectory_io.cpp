#include "uiknow/trajectory_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "uiknow/error.hpp"
#include "uiknow/serialization.hpp"

namespace uiknow {

namespace fs = std::filesystem;

namespace {

std::string step_file(std::size_t i) {
  char name[32];
  std::snprintf(name, sizeof name, "step_%04zu.png", i);
  return name;
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidDataset, path.string() + ": " + e.what());
  }
}

}  // namespace

void write_trajectory(const Trajectory& t, const fs::path& dir, const nlohmann::json& config) {
  fs::create_directories(dir);
  nlohmann::json meta{{"id", t.id},
                      {"goal", t.goal},
                      {"app", t.app},
                      {"status", to_string(t.status)},
                      {"parent_id", t.parent_id ? nlohmann::json(*t.parent_id) : nlohmann::json(nullptr)},
                      {"depth", t.depth},
                      {"sibling_index", t.sibling_index},
                      {"observations", t.observation_count()},
                      {"config", config}};
  {
    std::ofstream out(dir / "meta.json");
    out << meta.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::Io, "cannot write " + (dir / "meta.json").string());
  }
  std::ofstream lines(dir / "steps.jsonl");
  for (std::size_t i = 0; i < t.observation_count(); ++i) {
    const auto& obs = t.observation_at(i);
    write_png(obs.screenshot, dir / step_file(i));
    nlohmann::json rec{{"index", i},
                       {"screenshot", step_file(i)},
                       {"observation", observation_meta_to_json(obs)},
                       {"action", i < t.steps.size() ? action_to_json(t.steps[i].action) : nlohmann::json(nullptr)}};
    lines << rec.dump() << '\n';
  }
  if (!lines) throw Error(ErrorKind::Io, "cannot write " + (dir / "steps.jsonl").string());
}

Trajectory read_trajectory(const fs::path& dir) {
  const auto meta = read_json_file(dir / "meta.json");
  Trajectory t;
  try {
    t.id = meta.at("id").get<std::string>();
    t.goal = meta.at("goal").get<std::string>();
    t.app = meta.at("app").get<std::string>();
    t.status = episode_status_from_string(meta.at("status").get<std::string>());
    if (!meta.at("parent_id").is_null()) t.parent_id = meta.at("parent_id").get<std::string>();
    t.depth = meta.at("depth").get<int>();
    t.sibling_index = meta.at("sibling_index").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidDataset, (dir / "meta.json").string() + ": " + e.what());
  }

  std::ifstream in(dir / "steps.jsonl");
  if (!in) throw Error(ErrorKind::Io, "cannot open " + (dir / "steps.jsonl").string());
  std::string line;
  std::size_t line_no = 0;
  bool saw_final = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (saw_final) {
      throw Error(ErrorKind::InvalidDataset, "record after the final observation at line " + std::to_string(line_no));
    }
    try {
      const auto rec = nlohmann::json::parse(line);
      auto obs = observation_from_meta_json(rec.at("observation"),
                                            read_png(dir / rec.at("screenshot").get<std::string>()));
      if (rec.at("action").is_null()) {
        t.final_observation = std::move(obs);
        saw_final = true;
      } else {
        t.steps.push_back({std::move(obs), action_from_json(rec.at("action"))});
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidDataset,
                  (dir / "steps.jsonl").string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!saw_final) throw Error(ErrorKind::InvalidDataset, (dir / "steps.jsonl").string() + ": no final observation");
  if (const auto declared = meta.value("observations", t.observation_count()); declared != t.observation_count()) {
    throw Error(ErrorKind::InvalidDataset, (dir / "steps.jsonl").string() + ": meta declares " +
                                               std::to_string(declared) + " observations, found " +
                                               std::to_string(t.observation_count()));
  }
  return t;
}

std::vector<Trajectory> read_trajectories(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorKind::Io, "not a directory: " + root.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "meta.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<Trajectory> out;
  out.reserve(dirs.size());
  for (const auto& d : dirs) out.push_back(read_trajectory(d));
  return out;
}

}  // namespace uiknow
