#include <benchmark/benchmark.h>

#include "carpetlab/diagnostics.hpp"
#include "carpetlab/measure.hpp"

namespace {

carpetlab::GridMeasure split2d(int depth) {
  carpetlab::SplitParams p;
  p.tau = 2;
  p.depth = depth;
  p.seed = 5;
  const auto a = carpetlab::gen_split_measure_1d(p);
  p.seed = 6;
  return carpetlab::product_measure({a, carpetlab::gen_split_measure_1d(p)});
}

void BM_DoublingConstant(benchmark::State& state) {
  const auto mu = split2d(static_cast<int>(state.range(0)));
  const carpetlab::Scalar r(1, 16);
  for (auto _ : state) benchmark::DoNotOptimize(carpetlab::doubling_constant(mu, r));
}
BENCHMARK(BM_DoublingConstant)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_IsotropyAll(benchmark::State& state) {
  const auto mu = split2d(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(carpetlab::isotropy_constant_all(mu).A);
}
BENCHMARK(BM_IsotropyAll)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
