#include <benchmark/benchmark.h>

#include <random>

#include "vulnlib/engine.hpp"
#include "vulnlib/learner.hpp"
#include "vulnlib/synthetic.hpp"
#include "vulnlib/temporal.hpp"

using namespace vulnlib;

namespace {

SparseVector random_sparse(std::mt19937_64& rng, std::size_t dim, double density) {
  std::uniform_real_distribution<double> u(0, 1);
  SparseVector s;
  s.dim = dim;
  for (ColumnId c = 0; c < dim; ++c)
    if (u(rng) < density) s.entries.emplace_back(c, u(rng));
  return s;
}

const Dataset& corpus() {
  static const Dataset d = generate_synthetic();
  return d;
}

const Engine& engine() {
  static const Engine e = Engine::fit(corpus(), corpus().labels, EngineConfig{});
  return e;
}

}  // namespace

static void BM_Relevance(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto dim = static_cast<std::size_t>(state.range(0));
  WeightMatrix W(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (int j = 0; j < 16; ++j) W.set(r, rng() % dim, 0.1);
  auto d = random_sparse(rng, dim, 0.05), l = random_sparse(rng, dim, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(relevance(d, l, W));
}
BENCHMARK(BM_Relevance)->Arg(256)->Arg(4096);

static void BM_Train(benchmark::State& state) {
  EngineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(Engine::fit(corpus(), corpus().labels, cfg).training_pairs());
}
BENCHMARK(BM_Train)->Unit(benchmark::kMillisecond)->Iterations(3);

static void BM_Predict(benchmark::State& state) {
  const Engine& e = engine();
  LruCache cache(300);
  for (const auto& r : corpus().reports) insert_ground_truth(cache, r.labels);
  std::size_t i = 0;
  const bool adjusted = state.range(0) != 0;
  for (auto _ : state) {
    const auto& r = corpus().reports[i++ % corpus().size()];
    benchmark::DoNotOptimize(e.predict(r, cache, 3, adjusted));
  }
}
BENCHMARK(BM_Predict)->Arg(0)->Arg(1);

static void BM_Adjust(benchmark::State& state) {
  const Engine& e = engine();
  LruCache cache(300);
  for (const auto& r : corpus().reports) insert_ground_truth(cache, r.labels);
  auto top = e.rank(corpus().reports.back(), 10);
  for (auto& s : top) s.score = relevance_probability(s.score);
  AdjustmentParams params;
  for (auto _ : state) benchmark::DoNotOptimize(adjust(top, e.versions(), cache, params));
}
BENCHMARK(BM_Adjust);
