#include <benchmark/benchmark.h>

#include "degenstein/kernels.hpp"
#include "degenstein/kinetic.hpp"
#include "degenstein/solver.hpp"

using namespace degenstein;

namespace {

const CoefficientTable& table() {
  static const auto t =
      CoefficientTable::build(DegeneracyProfile::power(1.0), LambdaChoice::from_Lambda(1.0));
  return t;
}

std::vector<double> bump_field(const GridSpec& grid) {
  auto u = sample(grid, tent_bump({0.0, 0.0}, 0.5, 0.3));
  for (auto& v : u) v += 1e-6;
  return u;
}

void diffusion_step(benchmark::State& state, Exec exec) {
  const int n = static_cast<int>(state.range(0));
  const auto grid = GridSpec::box(-1, 1, -1, 1, n, n);
  const auto u = bump_field(grid);
  std::vector<double> D(u.size()), out(u.size());
  for (auto _ : state) {
    kernels::diffusivity(table(), 1e-6, u, D, exec);
    kernels::diffusion_update(grid, u, D, 1e-6, out, exec);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(u.size()));
}

void master(benchmark::State& state, MasterForm form, Exec exec) {
  const int n = static_cast<int>(state.range(0));
  const auto grid = GridSpec::box(-1, 1, -1, 1, n, n);
  const double sigma = 3.0 * grid.h(0);
  const auto model = JumpModel::power_law(1.0, 0.5 * sigma * sigma, 1.0);
  const Field f{bump_field(grid), 0.0};
  const double dt = 0.25 * min_waiting_time(model, f.values);
  for (auto _ : state) {
    auto out = master_step(f, grid, model, SinkTerm::none(), dt, form, exec);
    benchmark::DoNotOptimize(out.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.values.size()));
}

}  // namespace

BENCHMARK_CAPTURE(diffusion_step, serial, Exec::serial)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(diffusion_step, parallel, Exec::parallel)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(master, gather_serial, MasterForm::gather, Exec::serial)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(master, gather_parallel, MasterForm::gather, Exec::parallel)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(master, scatter_serial, MasterForm::scatter, Exec::serial)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(master, scatter_parallel, MasterForm::scatter, Exec::parallel)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
