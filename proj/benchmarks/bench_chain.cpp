#include <benchmark/benchmark.h>

#include "cma/normalized_chain.hpp"
#include "cma/ranked_density.hpp"
#include "cma/raw_chain.hpp"

using namespace cma;

namespace {

std::vector<Vector> fixed_batch(const Hyperparameters& hp) {
  const GaussianDistribution dist(hp.d);
  CounterRng rng(1, 0, 0);
  return sample_batch(dist, rng, hp.lambda);
}

void bench_step_raw(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Hyperparameters hp = default_hyperparameters(d);
  const Objective f = make_sphere(Vector::Zero(d));
  const GaussianDistribution dist(d);
  RawState s = RawState::initial(Vector::Ones(d), 1.0, d);
  std::uint64_t t = 0;
  for (auto _ : state) {
    CounterRng rng(2, 0, t++);
    s = step_raw(s, hp, f, rng, dist).state;
    benchmark::DoNotOptimize(s.sigma);
  }
}

void bench_step_smooth(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Hyperparameters hp = default_hyperparameters(d);
  const Objective f = make_sphere(Vector::Zero(d));
  const GaussianDistribution dist(d);
  SmoothState s = SmoothState::attractor(hp);
  s.z = Vector::Ones(d);
  std::uint64_t t = 0;
  for (auto _ : state) {
    CounterRng rng(3, 0, t++);
    s = step_smooth(s, hp, f, sample_batch(dist, rng, hp.lambda));
    benchmark::DoNotOptimize(s.r);
  }
}

void bench_ranked_density(benchmark::State& state) {
  const int d = 2;
  const GaussianDistribution dist(d);
  const Objective f = make_sphere(Vector::Zero(d));
  const RankedDensityContext ctx(Vector::Ones(d), SpdMatrix::identity(d), f,
                                 dist, 6, 3, 10000, 4);
  CounterRng rng(5, 0, 0);
  Matrix v(d, 3);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < d; ++i) v(i, j) = rng.next_gaussian();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ctx.density_alpha(v));
  }
}

}  // namespace

BENCHMARK(bench_step_raw)->Arg(2)->Arg(5)->Arg(10);
BENCHMARK(bench_step_smooth)->Arg(2)->Arg(5)->Arg(10);
BENCHMARK(bench_ranked_density);

BENCHMARK_MAIN();
