#include <benchmark/benchmark.h>

#include "ceamcl/driver.hpp"
#include "ceamcl/filter_core.hpp"
#include "ceamcl/models.hpp"
#include "ceamcl/world.hpp"

namespace {

using namespace ceamcl;

const OccupancyGrid& bench_map() {
  static OccupancyGrid map = build_symmetric_map(15.0, 2, 1.0, 0.1);
  return map;
}

void bm_raycast(benchmark::State& state) {
  const auto& map = bench_map();
  Pose p{3.75, 3.75, 0.0};
  double bearing = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(raycast(map, p, bearing, 20.0));
    bearing += 0.1;
  }
}
BENCHMARK(bm_raycast);

void bm_likelihood(benchmark::State& state) {
  const auto& map = bench_map();
  Pose truth{3.75, 3.75, 0.0};
  NoiseParams noise;
  auto bearings = default_bearings(static_cast<int>(state.range(0)));
  ScanObservation y = simulate_scan(map, truth, bearings, 20.0);
  Pose guess{3.9, 3.6, 0.05};
  for (auto _ : state) benchmark::DoNotOptimize(likelihood(y, guess, map, noise));
}
BENCHMARK(bm_likelihood)->Arg(16)->Arg(64);

void bm_resample(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  SampleSet set;
  Rng rng(7);
  for (int i = 0; i < n; ++i)
    set.samples.push_back({{rng.uniform(0, 15), rng.uniform(0, 15), 0.0}, rng.uniform()});
  normalize(set);
  for (auto _ : state) {
    Rng r(11);
    benchmark::DoNotOptimize(resample(set, n, r));
  }
}
BENCHMARK(bm_resample)->Arg(500)->Arg(5000);

void bm_step(benchmark::State& state, Variant variant) {
  const auto& map = bench_map();
  RunConfig config;
  config.n_test = 20000;
  config.fixed_n = 500;
  Pose truth{3.75, 3.75, 0.0};
  auto bearings = default_bearings(config.beams);
  ScanObservation y = simulate_scan(map, truth, bearings, config.scan_max_range);
  FilterState filter = init(variant, map, y, config, 3);
  OdometryControl u{0.0, 0.3, 0.0};
  for (auto _ : state) {
    step(filter, u, y);
    benchmark::DoNotOptimize(filter.t);
  }
}
BENCHMARK_CAPTURE(bm_step, mcl, Variant::Mcl);
BENCHMARK_CAPTURE(bm_step, gmcl, Variant::Gmcl);
BENCHMARK_CAPTURE(bm_step, ceamcl, Variant::Ceamcl);

}  // namespace

BENCHMARK_MAIN();
