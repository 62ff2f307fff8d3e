#include <benchmark/benchmark.h>

#include <cstddef>
#include <memory>
#include <vector>

#include "depthkit/depth.hpp"
#include "depthkit/dist.hpp"
#include "depthkit/evt.hpp"
#include "depthkit/refined.hpp"
#include "depthkit/types.hpp"

namespace {

using namespace depthkit;

Sample cauchy_sample(std::size_t n) {
  return dist::sample(DistSpec{Family::sphcauchy2d, {}, 1.0}, n, 7);
}

void bm_depth_2d_exact(benchmark::State& state) {
  Sample s = cauchy_sample(static_cast<std::size_t>(state.range(0)));
  const std::vector<double> q{1.5, -0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(depth::depth_2d_exact(s, q));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_depth_2d_exact)->Range(100, 10000)->Complexity();

void bm_depth_random(benchmark::State& state) {
  Sample s = dist::sample(DistSpec{Family::sphcauchy3d, {}, 1.0}, 500, 7);
  auto dirs = depth::DirectionSet::random(
      static_cast<std::size_t>(state.range(0)), 3, 11);
  const std::vector<double> q{1.5, -0.5, 0.25};
  for (auto _ : state) {
    benchmark::DoNotOptimize(depth::depth_random(s, q, dirs));
  }
}
BENCHMARK(bm_depth_random)->Arg(100)->Arg(500)->Arg(2000);

void bm_ray_calibrate(benchmark::State& state) {
  Sample s = cauchy_sample(static_cast<std::size_t>(state.range(0)));
  auto model = refined::HeavyTailDepthModel::fit_ray(s, s.n / 10);
  const std::vector<double> u{0.6, 0.8};
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.ray_calibrate(u));
  }
}
BENCHMARK(bm_ray_calibrate)->Arg(500)->Arg(2000);

void bm_refined_evaluate_ray(benchmark::State& state) {
  Sample s = cauchy_sample(500);
  auto model = refined::HeavyTailDepthModel::fit_ray(s, 50);
  const std::vector<double> q{250.0, 100.0};  // deep in the tail
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.evaluate(q).value);
  }
}
BENCHMARK(bm_refined_evaluate_ray);

void bm_evt_fits(benchmark::State& state) {
  Sample s = dist::sample(DistSpec{Family::cauchy1d, {}, 1.0}, 5000, 7);
  std::vector<double> abs_vals(s.data);
  for (double& v : abs_vals) v = v < 0 ? -v : v;
  auto ts = evt::make_tail_sample(abs_vals);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evt::hill(ts, 200));
    benchmark::DoNotOptimize(evt::moment(ts, 200));
    benchmark::DoNotOptimize(evt::scale(ts, 200));
  }
}
BENCHMARK(bm_evt_fits);

void bm_sampler(benchmark::State& state) {
  const DistSpec spec{Family::clover2d, {}, 1.0};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dist::sample(spec, 1000, ++seed));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(bm_sampler);

}  // namespace

BENCHMARK_MAIN();
