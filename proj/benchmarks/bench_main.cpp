#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "nlac/geometry.hpp"
#include "nlac/grid.hpp"
#include "nlac/kernel.hpp"
#include "nlac/solver.hpp"
#include "nlac/verify.hpp"

namespace {

void BM_ForwardInverse(benchmark::State& state) {
  const nlac::TorusGrid grid = nlac::make_grid(2, int(state.range(0)));
  const auto transform = nlac::SpectralTransform::for_grid(grid);
  nlac::Field field = nlac::random_band_limited(grid, 1);
  nlac::Spectrum spectrum(grid);
  for (auto _ : state) {
    transform->forward(field.values(), spectrum.coefficients());
    transform->inverse(spectrum.coefficients(), field.values());
    benchmark::DoNotOptimize(field.values().data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(grid.size()));
}
BENCHMARK(BM_ForwardInverse)->Arg(64)->Arg(128)->Arg(256)->Arg(512);

void BM_Multiplier(benchmark::State& state) {
  const nlac::MollifierSpec spec = nlac::default_mollifier(2);
  const double eta = std::ldexp(1.0, -int(state.range(0)));
  double k = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nlac::multiplier(spec, eta, k));
    k = k < 60.0 ? k + 0.37 : 1.0;
  }
}
BENCHMARK(BM_Multiplier)->Arg(2)->Arg(6)->Arg(10);

void BM_SymbolTable(benchmark::State& state) {
  const nlac::MollifierSpec spec = nlac::default_mollifier(2);
  const nlac::TorusGrid grid = nlac::make_grid(2, int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nlac::symbol_table(spec, 0.0625, grid));
}
BENCHMARK(BM_SymbolTable)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SolverStep(benchmark::State& state) {
  nlac::SolverConfig cfg;
  cfg.grid = nlac::make_grid(2, int(state.range(0)));
  cfg.epsilon = 0.05;
  cfg.dt = 1e-4;
  if (state.range(1) != 0) {
    cfg.op = nlac::NonlocalOperator{
        std::make_shared<const nlac::SymbolTable>(nlac::symbol_table(nlac::default_mollifier(2), 0.01, cfg.grid))};
  }
  nlac::Integrator integrator(cfg);
  nlac::Field state_field =
      nlac::approximate_solution(cfg.grid, nlac::make_interface(2, 1.0), 1.0, cfg.epsilon, cfg.potential);
  nlac::Spectrum spectrum = nlac::forward_transform(state_field);
  for (auto _ : state) {
    integrator.advance(state_field, spectrum);
    benchmark::DoNotOptimize(state_field.values().data());
  }
}
BENCHMARK(BM_SolverStep)->Args({128, 0})->Args({256, 0})->Args({256, 1})->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
