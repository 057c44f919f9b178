// Microbenchmarks for the hot paths: counter-RNG draws, wall resolution,
// release sampling, whole engine steps, and a reference-solver run.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "soaksim/continuum.hpp"
#include "soaksim/droplet.hpp"
#include "soaksim/model.hpp"
#include "soaksim/particles.hpp"
#include "soaksim/rng.hpp"

namespace {

using namespace soaksim;

SimulationConfig bench_config(double weight_mol) {
  SimulationConfig cfg = default_config();
  cfg.geometry.radius_m = 0.02;
  cfg.geometry.depth_m = 6e-3;
  cfg.species.diffusion_m2ps = 5e-11;
  cfg.species.concentration_molpm3 = 100.0;
  cfg.species.particle_weight_mol = weight_mol;
  cfg.droplet.volume_m3 = 1e-8;
  cfg.droplet.radius_m = 0.01;
  cfg.droplet.soaking_rate_mps = 1.2e-7;
  cfg.growth.initial_rate_mps = 1e-7;
  cfg.time_step_s = 10.0;
  cfg.end_time_s = 1e9;  // long horizon: the engine never runs out of steps
  cfg.snapshot_times_s.clear();
  cfg.timeseries_stride = 1;
  cfg.rng_seed = 7;
  return cfg;
}

void BM_philox_block(benchmark::State& state) {
  std::uint32_t c0 = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(philox::block(c0++, 1, 2, 3, 4, 5));
  }
}
BENCHMARK(BM_philox_block);

void BM_uniform01(benchmark::State& state) {
  CounterStream g(7, 1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.uniform01());
  }
}
BENCHMARK(BM_uniform01);

void BM_normal(benchmark::State& state) {
  CounterStream g(7, 1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.normal());
  }
}
BENCHMARK(BM_normal);

void BM_resolve_step(benchmark::State& state) {
  const PlateGeometry geom{0.02, 6e-3};
  for (auto _ : state) {
    // A proposal that dips below the surface and reflects back inside.
    benchmark::DoNotOptimize(reflect_cylinder(geom, 1e-3, 2e-3, 1e-5, 1.1e-3,
                                              2.05e-3, -1e-5));
  }
}
BENCHMARK(BM_resolve_step);

void BM_release_horizon(benchmark::State& state) {
  // Samples one full release horizon (50 intervals) per iteration.
  const SimulationConfig cfg = bench_config(1e-9);
  const SoakingModel model = make_soaking_model(cfg);
  for (auto _ : state) {
    ReleaseSampler sampler(model, cfg.species.particle_weight_mol);
    CounterStream rng(cfg.rng_seed, kReleaseStreamId, 0);
    std::uint64_t total = 0;
    for (int k = 0; k < 50; ++k) {
      const ReleaseBatch batch =
          sampler.sample_release_batch(10.0 * k, 10.0, rng);
      total += batch.count();
    }
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_release_horizon);

void BM_engine_step(benchmark::State& state) {
  // Weight chosen so roughly state.range(0) particles are in flight.
  const double weight = 1e-6 / static_cast<double>(state.range(0));
  SimulationConfig cfg = bench_config(weight);
  Engine engine(cfg, EngineOptions{1, true});
  // Warm up until the droplet has emptied so every step moves the full cloud.
  for (int k = 0; k < 200; ++k) engine.step();
  for (auto _ : state) {
    engine.step();
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(state.range(0)));
}
BENCHMARK(BM_engine_step)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_bin_snapshot(benchmark::State& state) {
  SimulationConfig cfg = bench_config(1e-10);  // 10000 particles
  Engine engine(cfg, EngineOptions{1, true});
  for (int k = 0; k < 100; ++k) engine.step();
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine.take_snapshot());
  }
}
BENCHMARK(BM_bin_snapshot);

void BM_solver_run(benchmark::State& state) {
  SimulationConfig cfg = bench_config(1e-9);
  cfg.end_time_s = 2000.0;
  cfg.snapshot_times_s = {2000.0};
  const std::uint32_t nr = static_cast<std::uint32_t>(state.range(0));
  const std::uint32_t nz = nr / 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(cfg, SolverGrid{nr, nz, 0.0, true}));
  }
}
BENCHMARK(BM_solver_run)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
