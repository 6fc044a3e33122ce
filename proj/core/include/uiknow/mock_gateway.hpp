#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uiknow/gateway.hpp"

namespace uiknow {

/// Replies from a FIFO script; running dry throws ScriptExhausted so tests
/// fail loudly on unexpected model calls.
class ScriptedChatClient final : public ChatClient {
 public:
  ScriptedChatClient() = default;
  explicit ScriptedChatClient(std::vector<std::string> replies);

  void push(std::string reply);
  std::string complete(const ChatRequest& request) override;

  std::size_t remaining() const;
  std::vector<ChatRequest> requests() const;

 private:
  mutable std::mutex mutex_;
  std::deque<std::string> replies_;
  std::vector<ChatRequest> requests_;
};

/// Replies computed by a callback from the request.
class ResponderChatClient final : public ChatClient {
 public:
  using Responder = std::function<std::string(const ChatRequest&)>;
  explicit ResponderChatClient(Responder responder) : responder_(std::move(responder)) {}

  std::string complete(const ChatRequest& request) override;
  std::size_t calls() const;

 private:
  Responder responder_;
  mutable std::mutex mutex_;
  std::size_t calls_ = 0;
};

/// Rule-driven mock for the command line. Rules are tried in order; a rule
/// matches when every `when` substring occurs in the prompt and its optional
/// `regex` finds a match. `reply` may use `$1`-style captures; `replies`
/// cycles through a list.
///
///   {"rules": [{"when": ["Knowledge A"], "reply": "1"},
///              {"regex": "User Goal: (.*)", "replies": ["...", "..."]}],
///    "default": "{\"action_type\": \"wait\"}"}
class RuleChatClient final : public ChatClient {
 public:
  explicit RuleChatClient(const nlohmann::json& script);
  std::string complete(const ChatRequest& request) override;

 private:
  struct Rule {
    std::vector<std::string> when;
    std::optional<std::regex> pattern;
    std::vector<std::string> replies;
    std::size_t next = 0;
  };
  mutable std::mutex mutex_;
  std::vector<Rule> rules_;
  std::optional<std::string> fallback_;
};

/// Deterministic embedder: images hash their 8x8 mean-colour grid cell by
/// cell, texts hash their lower-cased tokens; each hashed feature adds a
/// pseudo-random direction and the sum is normalised. Identical inputs give
/// cosine 1, inputs sharing no features land near-orthogonal.
class HashingEmbedder final : public EmbeddingClient {
 public:
  explicit HashingEmbedder(std::size_t dimension = 1152, std::uint64_t seed = 0);

  Embedding embed_image(const Image& image) override;
  Embedding embed_text(std::string_view text) override;
  std::size_t dimension() const override { return dimension_; }

 private:
  void accumulate(std::vector<double>& acc, std::uint64_t feature) const;

  std::size_t dimension_;
  std::uint64_t seed_;
};

}  // namespace uiknow
