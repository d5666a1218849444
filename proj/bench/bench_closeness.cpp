// Closeness checkers on the retimed thermostat pair: the O(nm) reference
// against the windowed checker, serial and OpenMP.
#include <benchmark/benchmark.h>

#include <map>

#include "hconf/automaton.hpp"
#include "hconf/closeness.hpp"
#include "hconf/simulate.hpp"

using namespace hconf;

namespace {

struct Pair {
  ATrace y1, y2;
};

// y2(t + 0.5) = y1(t) - 1 over [0, horizon], 100 samples per second.
const Pair& pair_for(int horizon) {
  static std::map<int, Pair> cache;
  auto it = cache.find(horizon);
  if (it != cache.end()) return it->second;
  Hioa a = build_thermostat();
  SimConfig cfg;
  cfg.step = 0.01;
  ATrace y1 = solution_pair(a, run(a, Stimulus{{}, {}, static_cast<double>(horizon)}, cfg)).y;
  ATrace moved = shift(y1, 0.5);
  std::vector<Trajectory> segs;
  for (const auto& seg : moved.segments()) {
    std::vector<ExtReal> v(seg.data());
    for (std::size_t i = 0; i < seg.size(); ++i) v[i * seg.dimension()] = v[i * seg.dimension()].value() - 1.0;
    segs.emplace_back(seg.variables(), seg.times(), std::move(v));
  }
  return cache.emplace(horizon, Pair{y1, ATrace(moved.variables(), std::move(segs))}).first->second;
}

// range(0): horizon in seconds; range(1): eps in tenths (10 close, 4 not).
ClosenessParams params(const benchmark::State& st) {
  return {0.8, st.range(1) / 10.0, static_cast<double>(st.range(0)), 1000000};
}

void BM_Naive(benchmark::State& st) {
  const Pair& p = pair_for(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(close_naive(p.y1, p.y2, params(st), NormMode::Extended).close);
  st.counters["points"] = static_cast<double>(p.y1.num_points() + p.y2.num_points());
}

void BM_WindowedSerial(benchmark::State& st) {
  const Pair& p = pair_for(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(close_ext(p.y1, p.y2, params(st), CheckOptions{false, false}).close);
  }
  st.counters["points"] = static_cast<double>(p.y1.num_points() + p.y2.num_points());
}

void BM_WindowedParallel(benchmark::State& st) {
  const Pair& p = pair_for(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(close_ext(p.y1, p.y2, params(st), CheckOptions{true, false}).close);
  }
  st.counters["points"] = static_cast<double>(p.y1.num_points() + p.y2.num_points());
}

}  // namespace

BENCHMARK(BM_Naive)->ArgsProduct({{10, 40, 160}, {10, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WindowedSerial)->ArgsProduct({{10, 40, 160, 640}, {10, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WindowedParallel)->ArgsProduct({{10, 40, 160, 640}, {10, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
