#pragma once

#include <chrono>
#include <mutex>
#include <string>

#include "uiknow/gateway.hpp"

namespace uiknow {

/// OpenAI-compatible endpoint settings. The API key is read from the
/// environment variable named by `api_key_env`, never stored in config.
struct HttpEndpoint {
  std::string base_url = "http://127.0.0.1:8000/v1";
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::milliseconds timeout{60000};
  int retries = 3;
  std::chrono::milliseconds backoff{500};
};

/// `POST {base_url}/chat/completions`. Retries connection failures, 408, 429
/// and 5xx with exponential backoff; other 4xx fail at once.
class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(HttpEndpoint endpoint);
  std::string complete(const ChatRequest& request) override;

  /// Raw `usage` object of the most recent successful call, if the server sent one.
  std::string last_usage() const;

 private:
  HttpEndpoint endpoint_;
  mutable std::mutex mutex_;
  std::string last_usage_;
};

/// `POST {base_url}/embeddings`; images are sent as PNG data URLs in `input`.
class HttpEmbeddingClient final : public EmbeddingClient {
 public:
  HttpEmbeddingClient(HttpEndpoint endpoint, std::size_t dimension);
  Embedding embed_image(const Image& image) override;
  Embedding embed_text(std::string_view text) override;
  std::size_t dimension() const override { return dimension_; }

 private:
  Embedding embed_input(const std::string& input);

  HttpEndpoint endpoint_;
  std::size_t dimension_;
};

}  // namespace uiknow
