#include "uiknow/gateway.hpp"

#include <cmath>

#include "uiknow/error.hpp"

namespace uiknow {

ChatRequest ChatRequest::user(std::string prompt, const std::vector<Image>& images) {
  ChatMessage message{"user", {}};
  message.parts.emplace_back(std::move(prompt));
  for (const auto& image : images) message.parts.emplace_back(EncodedImage{encode_png(image)});
  ChatRequest request;
  request.messages.push_back(std::move(message));
  return request;
}

std::string ChatRequest::text() const {
  std::string out;
  for (const auto& m : messages) {
    for (const auto& part : m.parts) {
      if (const auto* s = std::get_if<std::string>(&part)) {
        if (!out.empty()) out += '\n';
        out += *s;
      }
    }
  }
  return out;
}

std::size_t ChatRequest::image_count() const {
  std::size_t n = 0;
  for (const auto& m : messages) {
    for (const auto& part : m.parts) n += std::holds_alternative<EncodedImage>(part) ? 1 : 0;
  }
  return n;
}

Embedding Embedding::normalize(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::DimensionMismatch, "empty embedding");
  double norm = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::DimensionMismatch, "non-finite embedding value");
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) throw Error(ErrorKind::DimensionMismatch, "zero embedding");
  for (double& v : values) v /= norm;
  return {std::move(values), true};
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.values.size() != b.values.size()) {
    throw Error(ErrorKind::DimensionMismatch, "embedding lengths " + std::to_string(a.values.size()) +
                                                  " and " + std::to_string(b.values.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace uiknow
