#include <memory>
#include <random>

#include <benchmark/benchmark.h>

#include "regionplan/datagen.hpp"
#include "regionplan/losses.hpp"
#include "regionplan/planner.hpp"
#include "regionplan/region.hpp"

namespace rp = regionplan;

namespace {

void BM_PurityMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 gen(1);
  std::bernoulli_distribution coin(0.5);
  rp::RegionMask m(n, n);
  for (auto& c : m.cells()) c = coin(gen);
  for (auto _ : state) benchmark::DoNotOptimize(rp::purity_matrix(m));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_PurityMatrix)->Arg(64)->Arg(256);

void BM_HybridLoss(benchmark::State& state) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u;
  rp::RegionMask gt(256, 256);
  rp::ProbabilityMap pred(256, 256);
  for (auto& c : gt.cells()) c = u(gen) < 0.2;
  for (auto& c : pred.cells()) c = u(gen);
  const rp::LossConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(rp::hybrid_loss(pred, {}, gt, cfg));
}
BENCHMARK(BM_HybridLoss);

void BM_SegmentFree(benchmark::State& state) {
  rp::Rng rng(3);
  const rp::GridMap map = rp::generate_map(rp::GenParams::for_size(256), rng);
  std::vector<std::pair<rp::Point, rp::Point>> segments;
  for (int i = 0; i < 1024; ++i) {
    const rp::Point a = rp::uniform_sample(map, rng);
    segments.emplace_back(a, rp::steer(a, rp::uniform_sample(map, rng), 5.12));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = segments[i++ & 1023];
    benchmark::DoNotOptimize(rp::segment_free(map, a, b, rp::kDefaultResolution));
  }
}
BENCHMARK(BM_SegmentFree);

// One full planning run on a 64x64 narrow-passage instance, uniform vs
// oracle-region sampling.
void BM_Plan(benchmark::State& state) {
  const bool guided = state.range(0) != 0;
  rp::Rng rng(4);
  auto map = std::make_shared<const rp::GridMap>(rp::generate_map(rp::GenParams::for_size(64), rng));
  const rp::PlanInstance inst = rp::generate_instance(map, rng, 32.0);
  rp::PlannerConfig cfg = rp::default_planner_config(*map);
  cfg.reference_cost = rp::reference_path(*map, inst.start, inst.goal).cost;
  auto region = std::make_shared<const rp::RegionSampler>(
      rp::oracle_region(*map, inst.start, inst.goal, rp::default_dilation_radius(*map)));
  const rp::UniformSampler uniform(*map);
  const rp::BiasedSampler biased(region, map);
  std::size_t vertices = 0;
  for (auto _ : state) {
    cfg.rng_seed++;
    const rp::PlanResult r = rp::plan(inst, cfg, guided ? static_cast<const rp::Sampler&>(biased)
                                                         : static_cast<const rp::Sampler&>(uniform));
    vertices += r.vertices_added;
  }
  state.counters["vertices"] =
      benchmark::Counter(static_cast<double>(vertices), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_Plan)->Arg(0)->Arg(1)->ArgNames({"guided"})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
