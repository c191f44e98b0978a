#include <benchmark/benchmark.h>

#include "carpetlab/certification.hpp"
#include "carpetlab/measure.hpp"

namespace {

void BM_LevelMassesLebesgue(benchmark::State& state) {
  const auto spec = carpetlab::make_bm_carpet(2, 4, {{0, 0, 0}, {1, 1, 0}, {0, 2, 0}});
  const auto hole = carpetlab::find_hole(spec);
  const auto mu = carpetlab::lebesgue(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        carpetlab::level_masses(spec, mu, hole, static_cast<int>(state.range(0))).E);
  }
}
BENCHMARK(BM_LevelMassesLebesgue)->Arg(6)->Arg(13);

void BM_CertificateLebesgue(benchmark::State& state) {
  const auto spec = carpetlab::make_bm_carpet(2, 4, {{0, 0, 0}, {1, 1, 0}, {0, 2, 0}});
  const auto mu = carpetlab::lebesgue(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(carpetlab::thinness_certificate(spec, mu, 2, 1).valid);
  }
}
BENCHMARK(BM_CertificateLebesgue)->Unit(benchmark::kMillisecond);

}  // namespace
