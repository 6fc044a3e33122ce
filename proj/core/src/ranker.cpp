#include "uiknow/ranker.hpp"

#include <cctype>

#include <spdlog/spdlog.h>

#include "uiknow/error.hpp"

namespace uiknow {

std::optional<int> parse_preference(std::string_view reply) {
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  std::size_t i = 0;
  while (i < reply.size()) {
    if (!alnum(reply[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < reply.size() && alnum(reply[j])) ++j;
    const auto token = reply.substr(i, j - i);
    if (token == "1") return 1;
    if (token == "2") return 2;
    i = j;
  }
  return std::nullopt;
}

LlmComparator::LlmComparator(std::shared_ptr<ChatClient> chat, const PromptTemplate& prompt, int retries)
    : chat_(std::move(chat)), prompt_(prompt), retries_(retries) {
  if (!chat_) throw Error(ErrorKind::InvalidConfig, "comparator needs a chat client");
}

int LlmComparator::compare(std::string_view instruction, std::string_view a, std::string_view b) {
  ++comparisons_;
  const auto request = ChatRequest::user(prompt_.render(
      {{"task goal", std::string(instruction)}, {"knowledge a", std::string(a)}, {"knowledge b", std::string(b)}}));
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    try {
      if (auto choice = parse_preference(chat_->complete(request))) return *choice;
      spdlog::debug("event=ranker_malformed attempt={}", attempt);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ScriptExhausted) throw;
      spdlog::warn("event=ranker_model_error attempt={} kind={}", attempt, to_string(e.kind()));
    }
  }
  ++defaulted_;
  spdlog::warn("event=ranker_default choice=1");
  return 1;
}

std::vector<std::string> merge_knowledge(std::vector<std::string> a, std::vector<std::string> b,
                                         std::string_view instruction, Comparator& comparator) {
  return merge_runs(std::move(a), std::move(b), [&](const std::string& x, const std::string& y) {
    return comparator.compare(instruction, x, y) == 1;
  });
}

std::vector<std::string> sort_knowledge(std::vector<std::string> knowledge, std::string_view instruction,
                                        Comparator& comparator) {
  return merge_sort(std::move(knowledge), [&](const std::string& x, const std::string& y) {
    return comparator.compare(instruction, x, y) == 1;
  });
}

}  // namespace uiknow
