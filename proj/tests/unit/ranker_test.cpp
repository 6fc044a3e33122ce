#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "oracles.hpp"
#include "support.hpp"
#include "uiknow/error.hpp"
#include "uiknow/ranker.hpp"

using namespace uiknow;
using namespace uiknow::testing;

namespace {

/// Prefers the text with the higher score; scores are parsed from "s<number>".
class ScoreComparator final : public Comparator {
 public:
  int compare(std::string_view, std::string_view a, std::string_view b) override {
    ++calls;
    return score(a) > score(b) ? 1 : 2;
  }
  static long score(std::string_view s) { return std::stol(std::string(s.substr(1))); }
  std::size_t calls = 0;
};

class RandomComparator final : public Comparator {
 public:
  explicit RandomComparator(std::uint64_t seed) : rng_(seed) {}
  int compare(std::string_view, std::string_view, std::string_view) override { return 1 + static_cast<int>(rng_() % 2); }

 private:
  std::mt19937_64 rng_;
};

class ConstantComparator final : public Comparator {
 public:
  explicit ConstantComparator(int answer) : answer_(answer) {}
  int compare(std::string_view, std::string_view, std::string_view) override { return answer_; }

 private:
  int answer_;
};

std::vector<std::string> labels(const std::vector<long>& scores) {
  std::vector<std::string> out;
  for (long s : scores) out.push_back("s" + std::to_string(s));
  return out;
}

std::vector<long> distinct_scores(std::mt19937_64& rng, std::size_t n) {
  std::vector<long> s(n);
  std::iota(s.begin(), s.end(), 0L);
  for (auto& x : s) x = x * 7 + 3;
  std::shuffle(s.begin(), s.end(), rng);
  return s;
}

}  // namespace

TEST(ParsePreference, FirstStandaloneOneOrTwo) {
  EXPECT_EQ(parse_preference("1"), 1);
  EXPECT_EQ(parse_preference("  2\n"), 2);
  EXPECT_EQ(parse_preference("Answer: 2."), 2);
  EXPECT_EQ(parse_preference("12 then 1"), 1);
  EXPECT_EQ(parse_preference("neither"), std::nullopt);
  EXPECT_EQ(parse_preference("3"), std::nullopt);
}

TEST(SortKnowledge, BaseCasesMakeNoCalls) {
  ScoreComparator c;
  EXPECT_TRUE(sort_knowledge({}, "g", c).empty());
  EXPECT_EQ(sort_knowledge({"s5"}, "g", c), std::vector<std::string>{"s5"});
  EXPECT_EQ(c.calls, 0u);
}

TEST(SortKnowledge, HigherScoreFirst) {
  ScoreComparator c;
  EXPECT_EQ(sort_knowledge(labels({3, 1, 2}), "g", c), labels({3, 2, 1}));
}

TEST(SortKnowledge, ConsistentComparatorMatchesOracleSort) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = static_cast<std::size_t>(rng() % 65);
    auto scores = distinct_scores(rng, n);
    ScoreComparator c;
    const auto got = sort_knowledge(labels(scores), "g", c);
    std::sort(scores.begin(), scores.end(), std::greater<>());
    ASSERT_EQ(got, labels(scores)) << "n=" << n;
    // Every adjacent pair agrees with the comparator, so the pairwise agreement sum is maximal.
    for (std::size_t i = 1; i < got.size(); ++i) EXPECT_EQ(c.compare("g", got[i - 1], got[i]), 1);
  }
}

TEST(SortKnowledge, ComparisonCountBound) {
  std::mt19937_64 rng(2);
  for (std::size_t n = 1; n <= 256; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      ScoreComparator c;
      sort_knowledge(labels(distinct_scores(rng, n)), "g", c);
      const auto k = ceil_log2(n);
      EXPECT_LE(c.calls, n * k) << "n=" << n;
      EXPECT_LE(c.calls, n * k - (std::size_t{1} << k) + 1) << "n=" << n;
    }
  }
}

TEST(SortKnowledge, EightElementWorstCase) {
  std::vector<long> perm{0, 1, 2, 3, 4, 5, 6, 7};
  std::size_t worst = 0;
  do {
    ScoreComparator c;
    sort_knowledge(labels(perm), "g", c);
    worst = std::max(worst, c.calls);
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(worst, 17u);
}

TEST(SortKnowledge, AdversarialComparatorStillPermutes) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::size_t>(rng() % 80);
    std::vector<std::string> items;
    for (std::size_t i = 0; i < n; ++i) items.push_back("item" + std::to_string(rng() % 20));
    RandomComparator c(rng());
    auto out = sort_knowledge(items, "g", c);
    std::sort(items.begin(), items.end());
    std::sort(out.begin(), out.end());
    EXPECT_EQ(out, items);
  }
}

TEST(SortKnowledge, AlwaysLeftKeepsInputOrder) {
  ConstantComparator left(1);
  const std::vector<std::string> in{"c", "a", "d", "b", "e"};
  EXPECT_EQ(sort_knowledge(in, "g", left), in);
  ConstantComparator right(2);
  auto out = sort_knowledge(in, "g", right);
  EXPECT_EQ(out.size(), in.size());
}

TEST(MergeKnowledge, MergesSortedRuns) {
  ScoreComparator c;
  EXPECT_EQ(merge_knowledge(labels({9, 5, 1}), labels({8, 2}), "g", c), labels({9, 8, 5, 2, 1}));
  EXPECT_EQ(merge_knowledge({}, labels({4}), "g", c), labels({4}));
}

TEST(LlmComparator, RendersRankerPromptAndParses) {
  auto chat = std::make_shared<ScriptedChatClient>(std::vector<std::string>{"2"});
  LlmComparator cmp(chat, template_library().get(templates::kKnowledgeRanker));
  EXPECT_EQ(cmp.compare("turn on wifi", "tip A", "tip B"), 2);
  const auto prompt = chat->requests().at(0).text();
  EXPECT_NE(prompt.find("turn on wifi"), std::string::npos);
  EXPECT_NE(prompt.find("Knowledge A: tip A"), std::string::npos);
  EXPECT_NE(prompt.find("Knowledge B: tip B"), std::string::npos);
  EXPECT_EQ(cmp.comparisons(), 1u);
}

TEST(LlmComparator, MalformedRepliesRetryThenDefaultToLeft) {
  auto chat = std::make_shared<ScriptedChatClient>(std::vector<std::string>{"hmm", "2", "x", "y", "z"});
  LlmComparator cmp(chat, template_library().get(templates::kKnowledgeRanker), 2);
  EXPECT_EQ(cmp.compare("g", "a", "b"), 2);
  EXPECT_EQ(cmp.compare("g", "a", "b"), 1);
  EXPECT_EQ(cmp.defaulted(), 1u);
  EXPECT_EQ(chat->remaining(), 0u);
}

TEST(LlmComparator, ModelErrorsDefaultButUnderflowIsLoud) {
  LlmComparator failing(mock_gateway([](const ChatRequest&) -> std::string {
                          throw Error(ErrorKind::ModelTimeout, "slow");
                        }).chat,
                        template_library().get(templates::kKnowledgeRanker), 1);
  EXPECT_EQ(failing.compare("g", "a", "b"), 1);
  EXPECT_EQ(failing.defaulted(), 1u);

  LlmComparator empty(std::make_shared<ScriptedChatClient>(), template_library().get(templates::kKnowledgeRanker));
  EXPECT_THROW(empty.compare("g", "a", "b"), Error);
}

TEST(LlmComparator, SortThroughModelMatchesOracle) {
  auto gateway = mock_gateway([](const ChatRequest& r) {
    const auto text = r.text();
    auto field = [&](const std::string& tag) {
      const auto start = text.find(tag) + tag.size();
      return std::stol(text.substr(start + 1, text.find('\n', start) - start - 1));
    };
    return field("Knowledge A: ") > field("Knowledge B: ") ? std::string("1") : std::string("2");
  });
  LlmComparator cmp(gateway.chat, template_library().get(templates::kKnowledgeRanker));
  std::mt19937_64 rng(4);
  auto scores = distinct_scores(rng, 20);
  const auto got = sort_knowledge(labels(scores), "g", cmp);
  std::sort(scores.begin(), scores.end(), std::greater<>());
  EXPECT_EQ(got, labels(scores));
}

TEST(LlmComparator, ConcurrentCallsAreCounted) {
  auto chat = std::make_shared<ResponderChatClient>([](const ChatRequest&) { return std::string("1"); });
  LlmComparator cmp(chat, template_library().get(templates::kKnowledgeRanker));
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i) cmp.compare("g", "a", "b");
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(cmp.comparisons(), 200u);
  EXPECT_EQ(chat->calls(), 200u);
}
