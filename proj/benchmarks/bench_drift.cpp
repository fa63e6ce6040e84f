// Microbenchmarks for the update machinery: weighted JSD, window scans, and
// stale-set lookup through the entity index.

#include <benchmark/benchmark.h>

#include "chronoplay/drift.hpp"
#include "chronoplay/lifecycle.hpp"

using namespace chronoplay;

namespace {

TopicDistribution random_distribution(Rng& rng, std::size_t support) {
  std::map<TopicId, double> mass;
  double total = 0.0;
  for (std::size_t i = 0; i < support; ++i) {
    const double v = 1.0 + static_cast<double>(rng.bounded(1000));
    mass[TopicId{"M" + std::to_string(i % 6), "S" + std::to_string(i)}] = v;
    total += v;
  }
  for (auto& [t, v] : mass) v /= total;
  return make_distribution(mass, 100);
}

void BM_WeightedJsd(benchmark::State& state) {
  Rng rng(7);
  const auto pc = random_distribution(rng, static_cast<std::size_t>(state.range(0)));
  const auto pr = random_distribution(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(weighted_jsd(pc, pr, 1.5));
  }
}
BENCHMARK(BM_WeightedJsd)->Arg(6)->Arg(21);

void BM_PartitionPhases(benchmark::State& state) {
  const TopicId a{"M", "A"}, b{"M", "B"};
  std::vector<CommunityPost> posts;
  int id = 0;
  const int days = static_cast<int>(state.range(0));
  for (int day = 0; day < days; ++day) {
    for (int i = 0; i < 5; ++i) {
      CommunityPost p;
      p.post_id = "p" + std::to_string(id++);
      p.text = "x";
      p.created_at = day * kSecondsPerDay + i;
      p.topic = (day < days / 2) ? a : b;
      posts.push_back(std::move(p));
    }
  }
  DriftConfig config;
  config.window = 5 * kSecondsPerDay;
  config.step = kSecondsPerDay;
  config.min_posts = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        partition_phases(posts, 0, (days - 1) * kSecondsPerDay, config));
  }
}
BENCHMARK(BM_PartitionPhases)->Arg(60)->Arg(360);

void BM_FindStale(benchmark::State& state) {
  Rng rng(77);
  std::vector<EvalTuple> tuples;
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  for (std::size_t i = 0; i < n; ++i) {
    EvalTuple t;
    t.id = "t" + std::to_string(i);
    t.ref_ids = {"r"};
    t.topic = TopicId{"M", "S"};
    for (std::size_t e = 0; e < rng.bounded(5); ++e) {
      t.entities.insert("e" + std::to_string(rng.bounded(500)));
    }
    tuples.push_back(std::move(t));
  }
  std::set<EntityId> update;
  for (int e = 0; e < 8; ++e) update.insert("e" + std::to_string(rng.bounded(500)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_stale(tuples, update));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FindStale)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
