#include <benchmark/benchmark.h>

#include <memory>

#include "cospomdp/baselines.hpp"
#include "cospomdp/cos_pomdp.hpp"
#include "cospomdp/hierarchy.hpp"
#include "cospomdp/low_level.hpp"
#include "cospomdp/pouct.hpp"
#include "cospomdp/suite.hpp"

using namespace cospomdp;

namespace {

const ScenarioResources& trend_scenario() {
  static const ScenarioResources res(generate_trend_suite(2022, 1).front());
  return res;
}

void BM_BeliefUpdate(benchmark::State& state) {
  const ScenarioResources& res = trend_scenario();
  const CosModel model = res.model();
  const CosBelief b = CosBelief::uniform(model.map(), res.spec().init_pose);
  Rng rng(1);
  const JointObservation z = model.sample_observation(b.robot, res.spec().target.cell, rng);
  for (auto _ : state) benchmark::DoNotOptimize(belief_update(b, Action::RotateLeft, z, model));
}
BENCHMARK(BM_BeliefUpdate);

void BM_DetectionLikelihood(benchmark::State& state) {
  const ScenarioResources& res = trend_scenario();
  const DetectionModel& det = res.target_detector();
  const GridMap& m = res.spec().map;
  const Pose pose = res.spec().init_pose;
  det.likelihood(-1, 0, pose);
  int x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(det.likelihood(-1, x, pose));
    x = (x + 1) % m.num_cells();
  }
}
BENCHMARK(BM_DetectionLikelihood);

void BM_CorrelationalLikelihood(benchmark::State& state) {
  const ScenarioResources& res = trend_scenario();
  const ScenarioSpec& s = res.spec();
  const Detection z{1, s.objects.front().cell};
  for (auto _ : state) {
    benchmark::DoNotOptimize(correlational_likelihood(z, s.target.cell, s.init_pose,
                                                      s.objects.front().detector,
                                                      s.objects.front().correlation, s.map));
  }
}
BENCHMARK(BM_CorrelationalLikelihood);

void BM_LowLevelPlan(benchmark::State& state) {
  const ScenarioResources& res = trend_scenario();
  const CosModel model = res.model();
  const LowLevelModel low(model);
  const CosBelief b = CosBelief::uniform(model.map(), res.spec().init_pose);
  PlannerParams p = res.spec().hierarchy.low_level;
  p.num_sims = static_cast<int>(state.range(0));
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(plan(b, low, p, rng));
}
BENCHMARK(BM_LowLevelPlan)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_TopoGraph(benchmark::State& state) {
  const ScenarioResources& res = trend_scenario();
  const GridMap& m = res.spec().map;
  const PlaceProjection proj(m, res.spec().init_pose.cell);
  const std::vector<double> b = CosBelief::uniform(m, res.spec().init_pose).target_dist;
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_topo_graph(m, proj, b, res.spec().hierarchy, rng));
}
BENCHMARK(BM_TopoGraph)->Unit(benchmark::kMillisecond);

void BM_Astar(benchmark::State& state) {
  const ScenarioResources& res = trend_scenario();
  const GridMap& m = res.spec().map;
  const Cell goal = m.free_cells().back();
  for (auto _ : state) benchmark::DoNotOptimize(astar(m, res.spec().init_pose, goal));
}
BENCHMARK(BM_Astar);

void BM_ParticleUpdate(benchmark::State& state) {
  const ScenarioResources& res = trend_scenario();
  const CosModel model = res.model();
  Rng rng(4);
  ParticleBelief pb = ParticleBelief::from_prior(model, 1000, rng);
  const JointObservation z = model.sample_observation(res.spec().init_pose, res.spec().target.cell, rng);
  for (auto _ : state) {
    ParticleBelief copy = pb;
    particle_update(copy, z, model, 0.05, rng);
    benchmark::DoNotOptimize(copy);
  }
}
BENCHMARK(BM_ParticleUpdate);

}  // namespace

BENCHMARK_MAIN();
