#include <random>

#include <benchmark/benchmark.h>

#include <gilbert/minkowski.hpp>
#include <gilbert/optimizer.hpp>
#include <gilbert/oracle.hpp>

using namespace gilbert;

namespace {

Vector v2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

Instance random_instance(int n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 1.0), flow(0.5, 2.0);
  Instance inst;
  inst.space = NormSpace::lp(p);
  inst.weight = {1.0, 0.5};
  for (int i = 0; i < n; ++i) inst.sources.push_back({v2(coord(rng), coord(rng)), flow(rng)});
  inst.sink = v2(coord(rng), coord(rng));
  return inst;
}

void BM_Norm(benchmark::State& state) {
  const NormSpace space = NormSpace::lp(3.0);
  const Vector v = v2(0.3, -1.7);
  for (auto _ : state) benchmark::DoNotOptimize(norm(space, v));
}
BENCHMARK(BM_Norm);

void BM_DualVector(benchmark::State& state) {
  const NormSpace space = NormSpace::lp(3.0);
  const Vector v = v2(0.3, -1.7);
  for (auto _ : state) benchmark::DoNotOptimize(dual_vector(space, v));
}
BENCHMARK(BM_DualVector);

void BM_Solve(benchmark::State& state) {
  const Instance inst = random_instance(static_cast<int>(state.range(0)), 3.0, 7);
  for (auto _ : state) benchmark::DoNotOptimize(solve(inst).cost);
}
BENCHMARK(BM_Solve)->DenseRange(2, 6)->Unit(benchmark::kMillisecond);

void BM_GridSolve(benchmark::State& state) {
  const Instance inst = random_instance(static_cast<int>(state.range(0)), 3.0, 7);
  for (auto _ : state) benchmark::DoNotOptimize(grid_solve(inst, OracleOptions{}).cost);
}
BENCHMARK(BM_GridSolve)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
