#include <benchmark/benchmark.h>

#include "vgplan/blocksworld.hpp"
#include "vgplan/dataset.hpp"
#include "vgplan/rng.hpp"

namespace {

using namespace vgplan;

void BM_ApplicableActions(benchmark::State& state) {
  Rng rng(1);
  const State s = random_initial_state(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(applicable_actions(s));
}
BENCHMARK(BM_ApplicableActions)->Arg(3)->Arg(5)->Arg(8);

void BM_RandomWalkStep(benchmark::State& state) {
  Rng rng(2);
  State s = random_initial_state(8, rng);
  for (auto _ : state) {
    const auto acts = applicable_actions(s);
    s = apply(s, acts[rng.uniform_below(acts.size())]);
  }
}
BENCHMARK(BM_RandomWalkStep);

void BM_SerializeParse(benchmark::State& state) {
  Rng rng(3);
  const State s = random_initial_state(8, rng);
  for (auto _ : state) benchmark::DoNotOptimize(parse_state(serialize_state(s)));
}
BENCHMARK(BM_SerializeParse);

void BM_ExploreTrajectory(benchmark::State& state) {
  Rng rng(4);
  for (auto _ : state) {
    const State s = random_initial_state(5, rng);
    benchmark::DoNotOptimize(explore_trajectory(s, 20, rng));
  }
}
BENCHMARK(BM_ExploreTrajectory);

}  // namespace
