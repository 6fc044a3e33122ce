#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "uiknow/domain.hpp"

namespace uiknow {

/// Writes `dir/meta.json`, `dir/step_NNNN.png` for every observation
/// (including the final one) and `dir/steps.jsonl` with one record per
/// observation; the final record carries a null action.
void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& dir,
                      const nlohmann::json& config = nlohmann::json::object());

/// Throws Io for missing files, InvalidDataset for malformed records.
Trajectory read_trajectory(const std::filesystem::path& dir);

/// Every subdirectory of `root` holding a meta.json, in name order.
std::vector<Trajectory> read_trajectories(const std::filesystem::path& root);

}  // namespace uiknow
