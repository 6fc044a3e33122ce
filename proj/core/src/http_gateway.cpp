#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "uiknow/http_gateway.hpp"

#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "uiknow/error.hpp"

namespace uiknow {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // "/v1", never ends with '/'
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::InvalidConfig, "endpoint URL needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out{url.substr(0, path_start), path_start == std::string::npos ? "" : url.substr(path_start)};
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

bool transient_status(int status) { return status == 408 || status == 429 || status >= 500; }

enum class Outcome { Ok, Retry, Empty };

/// Posts `body` with retries; `accept` inspects a 200 body and reports whether
/// to keep it, retry, or treat it as an empty answer.
template <class Accept>
void post_with_retries(const HttpEndpoint& ep, const std::string& route, const nlohmann::json& body,
                       Accept&& accept) {
  const auto url = split_url(ep.base_url);
  httplib::Client client(url.origin);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(ep.timeout).count();
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(ep.timeout).count() % 1000000;
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  httplib::Headers headers;
  if (const char* key = std::getenv(ep.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const auto payload = body.dump();
  bool saw_empty = false;
  std::string last_error = "no attempt made";

  for (int attempt = 0; attempt <= ep.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(ep.backoff * (1 << std::min(attempt - 1, 10)));
    auto res = client.Post(url.path + route, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      spdlog::warn("event=model_retry route={} attempt={} reason=\"{}\"", route, attempt, last_error);
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      if (!transient_status(res->status)) {
        throw Error(ErrorKind::ModelRequestRejected, last_error + ": " + res->body.substr(0, 200));
      }
      spdlog::warn("event=model_retry route={} attempt={} status={}", route, attempt, res->status);
      continue;
    }
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("malformed response body: ") + e.what();
      continue;
    }
    switch (accept(parsed)) {
      case Outcome::Ok:
        return;
      case Outcome::Empty:
        saw_empty = true;
        last_error = "empty completion";
        break;
      case Outcome::Retry:
        last_error = "unexpected response shape";
        break;
    }
  }
  if (saw_empty) throw Error(ErrorKind::ModelRefusal, "model returned empty text after retries");
  throw Error(ErrorKind::ModelTimeout, route + " failed after " + std::to_string(ep.retries + 1) +
                                           " attempts: " + last_error);
}

nlohmann::json to_openai_messages(const ChatRequest& request) {
  auto messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    auto content = nlohmann::json::array();
    for (const auto& part : m.parts) {
      if (const auto* text = std::get_if<std::string>(&part)) {
        content.push_back({{"type", "text"}, {"text", *text}});
      } else {
        const auto& image = std::get<EncodedImage>(part);
        content.push_back({{"type", "image_url"},
                           {"image_url", {{"url", "data:image/png;base64," + base64_encode(image.png)}}}});
      }
    }
    messages.push_back({{"role", m.role}, {"content", std::move(content)}});
  }
  return messages;
}

}  // namespace

HttpChatClient::HttpChatClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  split_url(endpoint_.base_url);
}

std::string HttpChatClient::complete(const ChatRequest& request) {
  const nlohmann::json body{{"model", endpoint_.model},
                            {"messages", to_openai_messages(request)},
                            {"max_tokens", request.max_tokens},
                            {"temperature", request.temperature}};
  std::string text;
  post_with_retries(endpoint_, "/chat/completions", body, [&](const nlohmann::json& r) {
    try {
      const auto& message = r.at("choices").at(0).at("message");
      const auto& content = message.at("content");
      text = content.is_string() ? content.get<std::string>() : std::string{};
    } catch (const nlohmann::json::exception&) {
      return Outcome::Retry;
    }
    if (text.empty()) return Outcome::Empty;
    if (auto it = r.find("usage"); it != r.end()) {
      std::lock_guard lock(mutex_);
      last_usage_ = it->dump();
    }
    return Outcome::Ok;
  });
  return text;
}

std::string HttpChatClient::last_usage() const {
  std::lock_guard lock(mutex_);
  return last_usage_;
}

HttpEmbeddingClient::HttpEmbeddingClient(HttpEndpoint endpoint, std::size_t dimension)
    : endpoint_(std::move(endpoint)), dimension_(dimension) {
  split_url(endpoint_.base_url);
}

Embedding HttpEmbeddingClient::embed_input(const std::string& input) {
  const nlohmann::json body{{"model", endpoint_.model}, {"input", input}};
  std::vector<double> values;
  post_with_retries(endpoint_, "/embeddings", body, [&](const nlohmann::json& r) {
    try {
      values = r.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      return Outcome::Retry;
    }
    return Outcome::Ok;
  });
  if (values.size() != dimension_) {
    throw Error(ErrorKind::DimensionMismatch, "endpoint returned " + std::to_string(values.size()) +
                                                  " values, expected " + std::to_string(dimension_));
  }
  return Embedding::normalize(std::move(values));
}

Embedding HttpEmbeddingClient::embed_image(const Image& image) {
  if (image.empty()) throw Error(ErrorKind::EmptyImage, "cannot embed an empty image");
  return embed_input("data:image/png;base64," + base64_encode(encode_png(image)));
}

Embedding HttpEmbeddingClient::embed_text(std::string_view text) {
  if (text.empty()) throw Error(ErrorKind::PreconditionViolation, "cannot embed empty text");
  return embed_input(std::string(text));
}

}  // namespace uiknow
