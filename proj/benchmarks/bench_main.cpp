#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "stablab/lepage.hpp"
#include "stablab/nets.hpp"
#include "stablab/point_set.hpp"
#include "stablab/rng.hpp"
#include "stablab/sampler.hpp"
#include "stablab/spectral.hpp"

using namespace stablab;

static void BM_PhiloxWords(benchmark::State& state) {
  RngStream rng(1, 0);
  std::uint64_t acc = 0;
  for (auto _ : state) acc ^= rng.next_u64();
  benchmark::DoNotOptimize(acc);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PhiloxWords);

static void BM_PhiSample(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto [lo, hi] = beta_window_radial(1.5, 0.5, dim);
  const PhiDensity phi = PhiDensity::radial(dim, 0.5 * (lo + hi), 0.5);
  RngStream rng(2, 0);
  std::vector<double> x(dim), la(dim);
  for (auto _ : state) benchmark::DoNotOptimize(phi.sample(rng, x, la));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PhiSample)->Arg(1)->Arg(2)->Arg(3);

static void BM_StableDraw(benchmark::State& state) {
  RngStream rng(3, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sas_draw(1.5, 1.0, rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StableDraw);

// Series terms per second on a scattered grid of 16 points.
static void BM_SeriesGeneric(benchmark::State& state) {
  const FieldModel model = FieldModel::hfsm(1.5, 0.5, 1);
  PointSet grid(1);
  for (int i = 1; i <= 16; ++i) grid.push_back(std::vector<double>{i / 17.0});
  SeriesBudget budget;
  budget.terms = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    ++budget.seed;
    benchmark::DoNotOptimize(simulate_path(model, grid, budget));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SeriesGeneric)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_SeriesLattice(benchmark::State& state) {
  const FieldModel model = FieldModel::hfsm(1.5, 0.5, 1);
  const Net net = build_net(NetKind::dyadic, 1, static_cast<int>(state.range(0)));
  SeriesBudget budget;
  budget.terms = 2000;
  for (auto _ : state) {
    ++budget.seed;
    benchmark::DoNotOptimize(simulate_net(model, net, budget));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(budget.terms * net.size()));
}
BENCHMARK(BM_SeriesLattice)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_ScaleQuadrature(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const SpectralDensity sd = SpectralDensity::hfsm(1.5, 0.5, dim);
  std::vector<double> t(dim, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(scale_param(sd, t));
}
BENCHMARK(BM_ScaleQuadrature)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
