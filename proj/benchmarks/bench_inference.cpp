#include <benchmark/benchmark.h>

#include <random>

#include "iotavatar/profile/profile.hpp"
#include "iotavatar/service/replay.hpp"

using namespace iotavatar;

namespace {

SensorSnapshot random_snapshot(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> b(0, 780), m(1800, 3100);
  std::uniform_int_distribution<int> n(0, 4);
  SensorSnapshot s;
  s.brightness = b(rng);
  s.moisture = m(rng);
  s.people = n(rng);
  return s;
}

void BM_ScoreAffect(benchmark::State& state) {
  const profile::PlantProfile p;
  std::mt19937_64 rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(p.score_affect(random_snapshot(rng)));
}
BENCHMARK(BM_ScoreAffect);

void BM_Aggregate(benchmark::State& state) {
  const auto out = fuzzy::LinguisticVariable::auto_partitioned("y", 0, 300, fuzzy::kLevelLabels);
  std::vector<fuzzy::RuleActivation> acts;
  for (const char* t : {"Low", "Medium", "High"})
    acts.push_back({fuzzy::FuzzyRule{{fuzzy::TermRef{"a", "Poor"}, fuzzy::TermRef{"b", "Poor"}}, fuzzy::TermRef{"y", t}},
                    0.4});
  const auto samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fuzzy::defuzz_centroid(fuzzy::aggregate(acts, out, samples)));
}
BENCHMARK(BM_Aggregate)->Arg(301)->Arg(3001);

void BM_ClassifyGrid(benchmark::State& state) {
  for (auto _ : state)
    for (int v = 0; v <= 300; v += 25)
      for (int a = 0; a <= 300; a += 25) benchmark::DoNotOptimize(profile::classify({double(a), double(v)}));
}
BENCHMARK(BM_ClassifyGrid);

void BM_ReplayUnpaced(benchmark::State& state) {
  const auto sc = sim::load_scenario_file(IOTAVATAR_DATA_DIR "/scenarios/twelve_events.scn");
  const profile::PlantProfile p;
  service::ReplayOptions opt;
  opt.pace = false;
  for (auto _ : state) benchmark::DoNotOptimize(service::replay(sc, p, opt));
}
BENCHMARK(BM_ReplayUnpaced)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
