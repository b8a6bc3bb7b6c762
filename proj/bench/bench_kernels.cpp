// Serial reference against the OpenMP path for each data-parallel kernel.
// Arg 0 runs the serial path; arg n > 0 runs the parallel path on n workers.

#include <vector>

#include <benchmark/benchmark.h>

#include "dftrap/config.hpp"
#include "dftrap/cooling.hpp"
#include "dftrap/equilibrium.hpp"
#include "dftrap/mathieu.hpp"
#include "dftrap/scenarios.hpp"

using namespace dftrap;

namespace {

Execution setup(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  set_worker_count(w);
  state.SetLabel(w == 0 ? "serial" : "parallel");
  return w == 0 ? Execution::serial : Execution::parallel;
}

void workers(benchmark::internal::Benchmark* b) {
  for (int w : {0, 1, 2, 4, 8}) b->Arg(w);
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

void BM_StabilityScan(benchmark::State& state) {
  mathieu::ScanOptions opt;
  opt.exec = setup(state);
  for (auto _ : state) benchmark::DoNotOptimize(mathieu::stability_scan({0.0, 0.6}, {0.0, 0.2}, 31, 21, opt));
}
BENCHMARK(BM_StabilityScan)->Apply(workers);

void BM_BoundaryTrace(benchmark::State& state) {
  mathieu::ScanOptions opt;
  opt.exec = setup(state);
  std::vector<double> q;
  for (int i = 1; i <= 200; ++i) q.push_back(0.3 * i / 200);
  for (auto _ : state) benchmark::DoNotOptimize(mathieu::boundary_trace(q, mathieu::Side::lower, opt));
}
BENCHMARK(BM_BoundaryTrace)->Apply(workers);

void BM_PsdGrid(benchmark::State& state) {
  const Execution exec = setup(state);
  const auto cfg = config::preset("paper");
  auto c = scenarios::cooling_axis(cfg, Axis::x);
  const auto nb = scenarios::noise_budget(cfg);
  c.gamma_ion = nb.gamma_ion;
  c.gamma_np = nb.gamma_np;
  const auto m = scenarios::cooling_masses(cfg);
  const auto f = cooling::force_psds(nb, m);
  const auto grid = cooling::default_psd_grid(c, 2000);
  std::vector<double> si, sn;
  for (auto _ : state) {
    cooling::psd_on_grid(c, f, m, grid, si, sn, exec);
    benchmark::DoNotOptimize(si.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}
BENCHMARK(BM_PsdGrid)->Apply(workers);

void BM_FloquetEscapes(benchmark::State& state) {
  const Execution exec = setup(state);
  const auto cfg = config::preset("paper");
  const auto pts = scenarios::floquet_sample(cfg.seed, 16, 0.005);
  scenarios::FloquetProbe probe;
  probe.fast_periods = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(scenarios::floquet_escapes(cfg, pts, probe, exec));
}
BENCHMARK(BM_FloquetEscapes)->Apply(workers);

void BM_ColdEquilibriumCurve(benchmark::State& state) {
  equilibrium::CurveOptions opt;
  opt.warm_start = false;
  opt.exec = setup(state);
  auto cfg = config::preset("paper");
  cfg.equilibrium.line_points = 201;
  const auto line = scenarios::equilibrium_line(cfg);
  const auto p = scenarios::equilibrium_problem(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(equilibrium::ion_position_curve(line, p, opt));
}
BENCHMARK(BM_ColdEquilibriumCurve)->Apply(workers);

}  // namespace

BENCHMARK_MAIN();
