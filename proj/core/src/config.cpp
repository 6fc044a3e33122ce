#include "uiknow/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <toml.hpp>

#include "uiknow/error.hpp"
#include "uiknow/mock_gateway.hpp"

namespace uiknow {

namespace fs = std::filesystem;

namespace {

using nlohmann::json;

void only_keys(const json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, std::string(section) + " must be a table");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) {
      throw Error(ErrorKind::InvalidConfig,
                  "unknown key '" + key + "'" + (section.empty() ? "" : " in [" + std::string(section) + "]"));
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void read_endpoint(const json& j, std::string_view section, HttpEndpoint& ep) {
  only_keys(j, section, {"base_url", "model", "api_key_env", "timeout_ms", "retries", "backoff_ms"});
  read(j, "base_url", ep.base_url);
  read(j, "model", ep.model);
  read(j, "api_key_env", ep.api_key_env);
  if (auto it = j.find("timeout_ms"); it != j.end()) ep.timeout = std::chrono::milliseconds(it->get<std::int64_t>());
  read(j, "retries", ep.retries);
  if (auto it = j.find("backoff_ms"); it != j.end()) ep.backoff = std::chrono::milliseconds(it->get<std::int64_t>());
}

}  // namespace

void RunConfig::validate() const {
  if (gateway.mode != "http" && gateway.mode != "mock") {
    throw Error(ErrorKind::InvalidConfig, "gateway.mode must be \"http\" or \"mock\"");
  }
  if (gateway.mode == "mock" && !gateway.mock_script) {
    throw Error(ErrorKind::InvalidConfig, "gateway.mock_script is required in mock mode");
  }
  if (gateway.dimension == 0) throw Error(ErrorKind::InvalidConfig, "gateway.dimension must be positive");
  for (const auto* ep : {&gateway.chat, &gateway.embedding}) {
    if (ep->retries < 0) throw Error(ErrorKind::InvalidConfig, "retries must be >= 0");
    if (ep->timeout.count() <= 0) throw Error(ErrorKind::InvalidConfig, "timeout_ms must be positive");
  }
  exploration.validate();
  if (agent.max_steps < 1) throw Error(ErrorKind::InvalidConfig, "agent.max_steps must be >= 1");
  if (agent.top_k == 0) throw Error(ErrorKind::InvalidConfig, "retrieval.top_k must be positive");
  if (agent.tau < -1.0 || agent.tau > 1.0) throw Error(ErrorKind::InvalidConfig, "retrieval.tau must lie in [-1, 1]");
  if (store.dimension != gateway.dimension) {
    throw Error(ErrorKind::InvalidConfig, "store and gateway dimensions differ");
  }
  store.validate();
  if (jobs == 0) throw Error(ErrorKind::InvalidConfig, "jobs must be >= 1");
}

RunConfig run_config_from_json(const json& doc, const fs::path& base_dir) {
  RunConfig cfg;
  try {
    only_keys(doc, "", {"gateway", "exploration", "agent", "store", "retrieval", "template_dir", "jobs", "log_level"});
    if (auto it = doc.find("template_dir"); it != doc.end()) cfg.template_dir = resolve(base_dir, it->get<std::string>());
    read(doc, "jobs", cfg.jobs);
    read(doc, "log_level", cfg.log_level);

    if (auto it = doc.find("gateway"); it != doc.end()) {
      const auto& g = *it;
      only_keys(g, "gateway", {"mode", "dimension", "mock_script", "mock_seed", "chat", "embedding"});
      read(g, "mode", cfg.gateway.mode);
      read(g, "dimension", cfg.gateway.dimension);
      read(g, "mock_seed", cfg.gateway.mock_seed);
      if (auto s = g.find("mock_script"); s != g.end()) cfg.gateway.mock_script = resolve(base_dir, s->get<std::string>());
      if (auto c = g.find("chat"); c != g.end()) read_endpoint(*c, "gateway.chat", cfg.gateway.chat);
      if (auto e = g.find("embedding"); e != g.end()) read_endpoint(*e, "gateway.embedding", cfg.gateway.embedding);
    }
    if (auto it = doc.find("exploration"); it != doc.end()) {
      only_keys(*it, "exploration", {"branching_factor", "max_depth", "max_steps", "phash_threshold", "parse_retries"});
      read(*it, "branching_factor", cfg.exploration.branching_factor);
      read(*it, "max_depth", cfg.exploration.max_depth);
      read(*it, "max_steps", cfg.exploration.max_steps);
      read(*it, "phash_threshold", cfg.exploration.phash_threshold);
      read(*it, "parse_retries", cfg.exploration.parse_retries);
    }
    if (auto it = doc.find("agent"); it != doc.end()) {
      only_keys(*it, "agent", {"max_steps", "parse_retries", "ranker_retries"});
      read(*it, "max_steps", cfg.agent.max_steps);
      read(*it, "parse_retries", cfg.agent.parse_retries);
      read(*it, "ranker_retries", cfg.agent.ranker_retries);
    }
    if (auto it = doc.find("store"); it != doc.end()) {
      only_keys(*it, "store", {"path", "delta_k", "delta_v"});
      if (auto p = it->find("path"); p != it->end()) cfg.store_path = resolve(base_dir, p->get<std::string>());
      read(*it, "delta_k", cfg.store.delta_k);
      read(*it, "delta_v", cfg.store.delta_v);
    }
    if (auto it = doc.find("retrieval"); it != doc.end()) {
      only_keys(*it, "retrieval", {"tau", "top_k"});
      read(*it, "tau", cfg.agent.tau);
      read(*it, "top_k", cfg.agent.top_k);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("bad config value: ") + e.what());
  }
  cfg.store.dimension = cfg.gateway.dimension;
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto text = buf.str();

  json doc;
  try {
    const auto table = toml::parse(text, path.string());
    std::ostringstream as_json;
    as_json << toml::json_formatter{table};
    doc = json::parse(as_json.str());
  } catch (const toml::parse_error& toml_error) {
    try {
      doc = json::parse(text);
    } catch (const json::exception&) {
      std::ostringstream msg;
      msg << path.string() << " is neither TOML nor JSON: " << toml_error.description() << " (line "
          << toml_error.source().begin.line << ")";
      throw Error(ErrorKind::InvalidConfig, msg.str());
    }
  }
  return run_config_from_json(doc, path.parent_path());
}

Gateway make_gateway(const GatewayConfig& config) {
  if (config.mode == "mock") {
    if (!config.mock_script) throw Error(ErrorKind::InvalidConfig, "mock mode needs gateway.mock_script");
    std::ifstream in(*config.mock_script);
    if (!in) throw Error(ErrorKind::Io, "cannot open mock script " + config.mock_script->string());
    json script;
    try {
      script = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidConfig, "mock script " + config.mock_script->string() + ": " + e.what());
    }
    return {std::make_shared<RuleChatClient>(script),
            std::make_shared<HashingEmbedder>(config.dimension, config.mock_seed)};
  }
  if (config.mode == "http") {
    return {std::make_shared<HttpChatClient>(config.chat),
            std::make_shared<HttpEmbeddingClient>(config.embedding, config.dimension)};
  }
  throw Error(ErrorKind::InvalidConfig, "unknown gateway mode '" + config.mode + "'");
}

}  // namespace uiknow
