#include <gtest/gtest.h>

#include <fstream>

#include "support.hpp"
#include "uiknow/config.hpp"
#include "uiknow/error.hpp"

using namespace uiknow;
using namespace uiknow::testing;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

}  // namespace

TEST(Config, DefaultsAreValid) {
  RunConfig cfg;
  cfg.store.dimension = cfg.gateway.dimension;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.agent.top_k, 3u);
  EXPECT_DOUBLE_EQ(cfg.agent.tau, 0.85);
  EXPECT_DOUBLE_EQ(cfg.store.delta_k, 0.99);
  EXPECT_DOUBLE_EQ(cfg.store.delta_v, 0.1);
}

TEST(Config, TomlFixtureResolvesRelativePaths) {
  const auto cfg = load_run_config(fixture("config.toml"));
  EXPECT_EQ(cfg.gateway.mode, "mock");
  EXPECT_EQ(cfg.gateway.dimension, 256u);
  EXPECT_EQ(cfg.store.dimension, 256u);
  EXPECT_EQ(*cfg.gateway.mock_script, fixture("config.toml").parent_path() / "mock_script.json");
  EXPECT_EQ(cfg.store_path, fixture("config.toml").parent_path() / "knowledge.jsonl");
  EXPECT_EQ(cfg.exploration.branching_factor, 2);
  EXPECT_EQ(cfg.exploration.max_depth, 1);
  EXPECT_EQ(cfg.exploration.max_steps, 4);
  EXPECT_EQ(cfg.agent.max_steps, 5);
  EXPECT_EQ(cfg.log_level, "warn");
}

TEST(Config, JsonFallbackAndEndpoints) {
  TempDir dir("cfg");
  std::ofstream(dir / "c.json") << R"({"jobs": 3, "gateway": {"chat": {"base_url": "http://h:1/v1", "model": "m",
      "timeout_ms": 1500, "retries": 4, "backoff_ms": 10}}, "retrieval": {"tau": 0.5, "top_k": 7},
      "store": {"delta_k": 0.95, "delta_v": 0.2}, "template_dir": "tpl"})";
  const auto cfg = load_run_config(dir / "c.json");
  EXPECT_EQ(cfg.jobs, 3u);
  EXPECT_EQ(cfg.gateway.chat.base_url, "http://h:1/v1");
  EXPECT_EQ(cfg.gateway.chat.model, "m");
  EXPECT_EQ(cfg.gateway.chat.timeout.count(), 1500);
  EXPECT_EQ(cfg.gateway.chat.retries, 4);
  EXPECT_EQ(cfg.gateway.chat.backoff.count(), 10);
  EXPECT_DOUBLE_EQ(cfg.agent.tau, 0.5);
  EXPECT_EQ(cfg.agent.top_k, 7u);
  EXPECT_DOUBLE_EQ(cfg.store.delta_k, 0.95);
  EXPECT_EQ(*cfg.template_dir, dir.path() / "tpl");
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  auto bad = [](const char* text) { return kind_of([&] { run_config_from_json(nlohmann::json::parse(text)); }); };
  EXPECT_EQ(bad(R"({"colour": 1})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(bad(R"({"agent": {"max_step": 3}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(bad(R"({"agent": {"max_steps": 0}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(bad(R"({"agent": {"max_steps": "many"}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(bad(R"({"retrieval": {"tau": 2.0}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(bad(R"({"retrieval": {"top_k": 0}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(bad(R"({"gateway": {"mode": "magic"}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(bad(R"({"gateway": {"mode": "mock"}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(bad(R"({"jobs": 0})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(bad(R"({"exploration": {"branching_factor": 0}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(bad(R"({"store": {"delta_k": 1.5}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(bad(R"({"gateway": []})"), ErrorKind::InvalidConfig);

  TempDir dir("cfg");
  std::ofstream(dir / "junk.toml") << "this is [ not valid";
  EXPECT_EQ(kind_of([&] { load_run_config(dir / "junk.toml"); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([&] { load_run_config(dir / "absent.toml"); }), ErrorKind::Io);
}

TEST(Config, MockGatewayFollowsScript) {
  const auto cfg = load_run_config(fixture("config.toml"));
  const auto gateway = make_gateway(cfg.gateway);
  ASSERT_TRUE(gateway.chat);
  ASSERT_TRUE(gateway.embedder);
  EXPECT_EQ(gateway.embedder->dimension(), 256u);
  EXPECT_EQ(gateway.chat->complete(ChatRequest::user("... Respond ONLY with a integer value ...")), "1");

  GatewayConfig missing;
  missing.mode = "mock";
  missing.mock_script = "/nonexistent/script.json";
  EXPECT_EQ(kind_of([&] { make_gateway(missing); }), ErrorKind::Io);
}

TEST(Config, LoggingLevels) {
  EXPECT_NO_THROW(configure_logging("debug"));
  EXPECT_NO_THROW(configure_logging("warn"));
  EXPECT_EQ(kind_of([] { configure_logging("chatty"); }), ErrorKind::InvalidConfig);
}
