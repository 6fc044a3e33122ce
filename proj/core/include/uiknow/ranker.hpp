#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uiknow/gateway.hpp"
#include "uiknow/prompt_template.hpp"

namespace uiknow {

/// Pairwise preference: 1 when `a` is more useful for `instruction`, else 2.
class Comparator {
 public:
  virtual ~Comparator() = default;
  virtual int compare(std::string_view instruction, std::string_view a, std::string_view b) = 0;
};

/// First standalone "1" or "2" token in a reply.
std::optional<int> parse_preference(std::string_view reply);

/// Asks the chat model with the knowledge-ranker prompt. Malformed replies
/// and model errors are retried, then answered with 1 so incoming order is kept.
class LlmComparator final : public Comparator {
 public:
  LlmComparator(std::shared_ptr<ChatClient> chat, const PromptTemplate& prompt, int retries = 2);

  int compare(std::string_view instruction, std::string_view a, std::string_view b) override;

  std::size_t comparisons() const noexcept { return comparisons_; }
  std::size_t defaulted() const noexcept { return defaulted_; }

 private:
  std::shared_ptr<ChatClient> chat_;
  const PromptTemplate& prompt_;
  int retries_;
  std::atomic<std::size_t> comparisons_{0};
  std::atomic<std::size_t> defaulted_{0};
};

/// Merges two ordered runs; `left_first(a, b)` decides whether a precedes b.
template <class T, class LeftFirst>
std::vector<T> merge_runs(std::vector<T> a, std::vector<T> b, LeftFirst&& left_first) {
  std::vector<T> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (left_first(a[i], b[j])) {
      out.push_back(std::move(a[i++]));
    } else {
      out.push_back(std::move(b[j++]));
    }
  }
  for (; i < a.size(); ++i) out.push_back(std::move(a[i]));
  for (; j < b.size(); ++j) out.push_back(std::move(b[j]));
  return out;
}

/// Top-down merge sort splitting at floor(n/2); at most
/// n*ceil(log2 n) - 2^ceil(log2 n) + 1 calls to `left_first`.
template <class T, class LeftFirst>
std::vector<T> merge_sort(std::vector<T> items, LeftFirst&& left_first) {
  if (items.size() <= 1) return items;
  const auto mid = items.size() / 2;
  std::vector<T> right(std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(mid)),
                       std::make_move_iterator(items.end()));
  items.resize(mid);
  return merge_runs(merge_sort(std::move(items), left_first), merge_sort(std::move(right), left_first),
                    left_first);
}

/// Two knowledge lists merged by the comparator.
std::vector<std::string> merge_knowledge(std::vector<std::string> a, std::vector<std::string> b,
                                         std::string_view instruction, Comparator& comparator);

/// Knowledge ordered from most to least useful for `instruction`.
std::vector<std::string> sort_knowledge(std::vector<std::string> knowledge, std::string_view instruction,
                                        Comparator& comparator);

}  // namespace uiknow
