#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uiknow/image.hpp"

namespace uiknow {

struct EncodedImage {
  std::vector<std::uint8_t> png;
};

using ContentPart = std::variant<std::string, EncodedImage>;

struct ChatMessage {
  std::string role;
  std::vector<ContentPart> parts;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  int max_tokens = 1024;
  double temperature = 0.0;

  /// Single user message: the prompt text followed by PNG-encoded images.
  static ChatRequest user(std::string prompt, const std::vector<Image>& images = {});

  /// All text parts joined by newlines; what text-only mocks look at.
  std::string text() const;
  std::size_t image_count() const;
};

/// Dense embedding vector; unit-norm when `normalized`.
struct Embedding {
  std::vector<double> values;
  bool normalized = false;

  std::size_t dimension() const noexcept { return values.size(); }

  /// Scales to unit length. Throws DimensionMismatch on empty, zero or
  /// non-finite input.
  static Embedding normalize(std::vector<double> values);
};

/// Cosine similarity. Throws DimensionMismatch on differing lengths.
double cosine(const Embedding& a, const Embedding& b);

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Throws ModelTimeout when retries are exhausted, ModelRefusal when the
  /// model keeps answering with empty text.
  virtual std::string complete(const ChatRequest& request) = 0;
};

class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  virtual Embedding embed_image(const Image& image) = 0;
  virtual Embedding embed_text(std::string_view text) = 0;
  virtual std::size_t dimension() const = 0;
};

/// The two model capabilities every component consumes.
struct Gateway {
  std::shared_ptr<ChatClient> chat;
  std::shared_ptr<EmbeddingClient> embedder;
};

}  // namespace uiknow
