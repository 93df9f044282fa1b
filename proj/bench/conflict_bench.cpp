// Serial vs OpenMP conflict detection on plans of independently planned agents.
#include <benchmark/benchmark.h>

#include <map>
#include <stdexcept>

#include "krcbs/conflicts.hpp"
#include "krcbs/harness.hpp"
#include "krcbs/lowlevel.hpp"

using namespace krcbs;

namespace {

struct Fixture {
  Instance inst;
  Plan plan;
};

// 64x64 map, 10% obstacles, shortest paths that ignore each other
const Fixture& fixture(int agents) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(agents);
  if (it != cache.end()) return it->second;
  Fixture f{random_instance(64, 64, 0.1, agents, 1, 42), {}};
  for (const auto& t : f.inst.tasks) {
    auto p = plan_path(f.inst.map, t, {});
    if (!p) throw std::runtime_error("unreachable goal in benchmark instance");
    f.plan.push_back(std::move(*p));
  }
  return cache.emplace(agents, std::move(f)).first->second;
}

void BM_DetectSerial(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  std::size_t found = 0;
  for (auto _ : state) {
    auto cs = detect_conflicts(f.plan, k, f.inst.map);
    found = cs.size();
    benchmark::DoNotOptimize(cs.data());
  }
  state.counters["conflicts"] = static_cast<double>(found);
}

void BM_DetectParallel(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  std::size_t found = 0;
  for (auto _ : state) {
    auto cs = detect_conflicts_parallel(f.plan, k, f.inst.map);
    found = cs.size();
    benchmark::DoNotOptimize(cs.data());
  }
  state.counters["conflicts"] = static_cast<double>(found);
}

}  // namespace

BENCHMARK(BM_DetectSerial)->ArgsProduct({{50, 200, 800}, {0, 1, 3}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DetectParallel)->ArgsProduct({{50, 200, 800}, {0, 1, 3}})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
