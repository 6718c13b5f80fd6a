#include <benchmark/benchmark.h>

#include <random>

#include "adasent/model.hpp"
#include "adasent/pyramid.hpp"
#include "adasent/training.hpp"

namespace {

using namespace adasent;

std::vector<Vector> random_words(std::size_t count, std::size_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vector> out(count, Vector(dim));
  for (auto& v : out)
    for (double& x : v.values()) x = u(rng);
  return out;
}

void BM_ForwardPyramid(benchmark::State& state) {
  const auto length = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(1);
  const auto params = CompositionParams::random(dim, rng);
  const auto words = random_words(length, dim, rng);
  for (auto _ : state) {
    auto trace = forward_pyramid(words, params);
    benchmark::DoNotOptimize(trace.top()[0]);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(length * (length - 1) / 2));
}
BENCHMARK(BM_ForwardPyramid)->ArgsProduct({{5, 20, 60}, {25, 50, 100}})->Unit(benchmark::kMicrosecond);

void BM_ForwardBackward(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const auto length = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(2);
  ModelConfig config;
  config.kind = kind;
  EmbeddingTable table{Matrix(50, 200), true};
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& x : table.vectors.values()) x = u(rng);
  const auto params = ModelParams::create(config, table, rng);
  std::vector<LabeledSequence> batch(1);
  for (std::size_t i = 0; i < length; ++i) batch[0].ids.push_back(rng() % 200);
  auto grads = Gradients::zeros_like(params);
  for (auto _ : state) {
    grads.clear();
    auto loss = accumulate_gradients(batch, params, 1e-4, grads);
    benchmark::DoNotOptimize(loss.total);
  }
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_ForwardBackward)
    ->ArgsProduct({{0, 1, 2, 3, 4}, {3, 20}})
    ->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
