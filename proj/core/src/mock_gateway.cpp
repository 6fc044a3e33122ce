#include "uiknow/mock_gateway.hpp"

#include <cctype>

#include <nlohmann/json.hpp>

#include "uiknow/error.hpp"
#include "uiknow/sim_environment.hpp"
#include "uiknow/vision.hpp"

namespace uiknow {

namespace {

std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

ScriptedChatClient::ScriptedChatClient(std::vector<std::string> replies)
    : replies_(replies.begin(), replies.end()) {}

void ScriptedChatClient::push(std::string reply) {
  std::lock_guard lock(mutex_);
  replies_.push_back(std::move(reply));
}

std::string ScriptedChatClient::complete(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  requests_.push_back(request);
  if (replies_.empty()) {
    throw Error(ErrorKind::ScriptExhausted, "scripted model has no reply left for call #" +
                                                std::to_string(requests_.size()));
  }
  auto reply = std::move(replies_.front());
  replies_.pop_front();
  return reply;
}

std::size_t ScriptedChatClient::remaining() const {
  std::lock_guard lock(mutex_);
  return replies_.size();
}

std::vector<ChatRequest> ScriptedChatClient::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

std::string ResponderChatClient::complete(const ChatRequest& request) {
  {
    std::lock_guard lock(mutex_);
    ++calls_;
  }
  return responder_(request);
}

std::size_t ResponderChatClient::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

RuleChatClient::RuleChatClient(const nlohmann::json& j) {
  try {
    for (const auto& rj : j.at("rules")) {
      Rule rule;
      if (auto it = rj.find("when"); it != rj.end()) rule.when = it->get<std::vector<std::string>>();
      if (auto it = rj.find("regex"); it != rj.end()) rule.pattern.emplace(it->get<std::string>());
      if (auto it = rj.find("reply"); it != rj.end()) rule.replies.push_back(it->get<std::string>());
      if (auto it = rj.find("replies"); it != rj.end()) {
        for (const auto& r : *it) rule.replies.push_back(r.get<std::string>());
      }
      if (rule.replies.empty()) throw Error(ErrorKind::InvalidConfig, "mock rule without reply");
      rules_.push_back(std::move(rule));
    }
    if (auto it = j.find("default"); it != j.end()) fallback_ = it->get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("bad mock script: ") + e.what());
  } catch (const std::regex_error& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("bad mock regex: ") + e.what());
  }
}

std::string RuleChatClient::complete(const ChatRequest& request) {
  const auto prompt = request.text();
  std::lock_guard lock(mutex_);
  for (auto& rule : rules_) {
    bool ok = true;
    for (const auto& needle : rule.when) {
      if (prompt.find(needle) == std::string::npos) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    std::smatch match;
    if (rule.pattern && !std::regex_search(prompt, match, *rule.pattern)) continue;
    const auto& reply = rule.replies[rule.next % rule.replies.size()];
    ++rule.next;
    return rule.pattern ? match.format(reply) : reply;
  }
  if (fallback_) return *fallback_;
  throw Error(ErrorKind::ScriptExhausted, "no mock rule matches the prompt");
}

HashingEmbedder::HashingEmbedder(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension == 0) throw Error(ErrorKind::DimensionMismatch, "embedding dimension must be positive");
}

void HashingEmbedder::accumulate(std::vector<double>& acc, std::uint64_t feature) const {
  std::uint64_t state = mix(feature ^ mix(seed_));
  for (auto& v : acc) {
    state += 0x9E3779B97F4A7C15ULL;
    const std::uint64_t r = mix(state);
    v += static_cast<double>(r >> 11) * 0x1.0p-52 - 1.0;
  }
}

Embedding HashingEmbedder::embed_image(const Image& image) {
  if (image.empty()) throw Error(ErrorKind::EmptyImage, "cannot embed an empty image");
  const AreaGrid grid(image, 8, 8);
  std::vector<double> acc(dimension_, 0.0);
  for (int row = 0; row < 8; ++row) {
    for (int col = 0; col < 8; ++col) {
      const Rgb m = grid.mean(col, row);
      const std::uint64_t bin = (m.r >> 5) * 64U + (m.g >> 5) * 8U + (m.b >> 5);
      accumulate(acc, stable_hash("img") ^ mix((static_cast<std::uint64_t>(row * 8 + col) << 16) | bin));
    }
  }
  return Embedding::normalize(std::move(acc));
}

Embedding HashingEmbedder::embed_text(std::string_view text) {
  if (text.empty()) throw Error(ErrorKind::PreconditionViolation, "cannot embed empty text");
  std::vector<double> acc(dimension_, 0.0);
  std::string token;
  bool any = false;
  auto flush = [&] {
    if (token.empty()) return;
    accumulate(acc, stable_hash("txt:" + token));
    any = true;
    token.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      token += static_cast<char>(std::tolower(c));
    } else {
      flush();
    }
  }
  flush();
  if (!any) accumulate(acc, stable_hash("raw:" + std::string(text)));
  return Embedding::normalize(std::move(acc));
}

}  // namespace uiknow
