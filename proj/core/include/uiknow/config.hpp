#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "uiknow/agent.hpp"
#include "uiknow/explorer.hpp"
#include "uiknow/gateway.hpp"
#include "uiknow/http_gateway.hpp"
#include "uiknow/knowledge_store.hpp"

namespace uiknow {

struct GatewayConfig {
  /// "http" for live endpoints, "mock" for the rule-driven chat mock and hashing embedder.
  std::string mode = "http";
  HttpEndpoint chat;
  HttpEndpoint embedding;
  std::size_t dimension = 1152;
  std::optional<std::filesystem::path> mock_script;
  std::uint64_t mock_seed = 0;
};

/// Everything a command needs. Command-line flags are applied on top.
struct RunConfig {
  GatewayConfig gateway;
  ExplorationConfig exploration;
  AgentConfig agent;
  StoreConfig store;
  std::filesystem::path store_path = "knowledge.jsonl";
  std::optional<std::filesystem::path> template_dir;
  std::size_t jobs = 1;
  std::string log_level = "info";

  /// Throws InvalidConfig.
  void validate() const;
};

/// Reads the layout below; unknown keys are errors. Relative paths resolve
/// against `base_dir`.
///
///   template_dir, jobs, log_level
///   [gateway]      mode, dimension, mock_script, mock_seed
///   [gateway.chat] / [gateway.embedding]
///                  base_url, model, api_key_env, timeout_ms, retries, backoff_ms
///   [exploration]  branching_factor, max_depth, max_steps, phash_threshold, parse_retries
///   [agent]        max_steps, parse_retries, ranker_retries
///   [store]        path, delta_k, delta_v
///   [retrieval]    tau, top_k
RunConfig run_config_from_json(const nlohmann::json& document, const std::filesystem::path& base_dir = {});

/// TOML, falling back to JSON. Throws InvalidConfig or Io.
RunConfig load_run_config(const std::filesystem::path& path);

Gateway make_gateway(const GatewayConfig& config);

/// Line-oriented records on stderr. Throws InvalidConfig for an unknown level.
void configure_logging(const std::string& level);

}  // namespace uiknow
