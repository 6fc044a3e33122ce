#include <benchmark/benchmark.h>

#include <random>

#include "uiknow/image.hpp"
#include "uiknow/vision.hpp"

namespace {

uiknow::Image noise(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  uiknow::Image img(w, h);
  for (auto& b : img.bytes()) b = static_cast<std::uint8_t>(rng());
  return img;
}

void BM_Phash(benchmark::State& state) {
  const auto side = static_cast<int>(state.range(0));
  const auto img = noise(side, side * 2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(uiknow::phash(img));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(img.bytes().size()));
}
BENCHMARK(BM_Phash)->Arg(64)->Arg(540)->Arg(1080);

void BM_Hamming(benchmark::State& state) {
  const auto a = uiknow::phash(noise(64, 64, 2));
  const auto b = uiknow::phash(noise(64, 64, 3));
  for (auto _ : state) benchmark::DoNotOptimize(uiknow::hamming_distance(a, b));
}
BENCHMARK(BM_Hamming);

}  // namespace
