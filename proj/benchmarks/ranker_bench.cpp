#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "uiknow/ranker.hpp"

namespace {

class LengthComparator final : public uiknow::Comparator {
 public:
  int compare(std::string_view, std::string_view a, std::string_view b) override {
    return a.size() >= b.size() ? 1 : 2;
  }
};

void BM_SortKnowledge(benchmark::State& state) {
  std::mt19937_64 rng(9);
  std::vector<std::string> items;
  for (std::int64_t i = 0; i < state.range(0); ++i) items.emplace_back(1 + rng() % 200, 'x');
  LengthComparator cmp;
  for (auto _ : state) benchmark::DoNotOptimize(uiknow::sort_knowledge(items, "goal", cmp));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SortKnowledge)->RangeMultiplier(4)->Range(4, 4096)->Complexity(benchmark::oNLogN);

}  // namespace
