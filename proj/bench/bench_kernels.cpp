// Serial reference vs OpenMP kernels on a seeded synthetic ensemble.

#include <benchmark/benchmark.h>

#include <vector>

#include "divdis/kernels.hpp"
#include "divdis/synth.hpp"

namespace {

using namespace divdis;

struct Fixture {
  SynthWorld world;
  std::vector<const PredictionSet*> sets;
  std::vector<PairIndex> pairs;

  Fixture() {
    SynthConfig cfg;
    cfg.severities = {};
    world = generate_world(cfg);
    for (const auto& m : world.ensemble.manifest.models) sets.push_back(&world.ensemble.at(m.id, "id"));
    for (std::size_t a = 0; a < sets.size(); ++a) {
      for (std::size_t b = a + 1; b < sets.size(); ++b) pairs.push_back({a, b});
    }
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_PairsSerial(benchmark::State& state) {
  const auto& f = fixture();
  const auto n = static_cast<Notion>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial::pair_disagreements(f.sets, f.pairs, n));
  state.SetLabel(std::string(to_string(n)));
}

void BM_PairsParallel(benchmark::State& state) {
  const auto& f = fixture();
  const auto n = static_cast<Notion>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pair_disagreements(f.sets, f.pairs, n));
  state.SetLabel(std::string(to_string(n)) + " threads=" + std::to_string(worker_threads()));
}

void BM_ErrorsSerial(benchmark::State& state) {
  const auto& f = fixture();
  const auto n = static_cast<Notion>(state.range(0));
  const auto& labels = f.world.ensemble.labels.at("id");
  for (auto _ : state) benchmark::DoNotOptimize(serial::model_errors(f.sets, labels, n));
}

void BM_ErrorsParallel(benchmark::State& state) {
  const auto& f = fixture();
  const auto n = static_cast<Notion>(state.range(0));
  const auto& labels = f.world.ensemble.labels.at("id");
  for (auto _ : state) benchmark::DoNotOptimize(model_errors(f.sets, labels, n));
}

}  // namespace

BENCHMARK(BM_PairsSerial)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairsParallel)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ErrorsSerial)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ErrorsParallel)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
