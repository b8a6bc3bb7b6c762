// Serial reference paths against the OpenMP kernels at several team sizes.

#include "doctest.h"
#include "dftrap/config.hpp"
#include "dftrap/cooling.hpp"
#include "dftrap/equilibrium.hpp"
#include "dftrap/mathieu.hpp"
#include "dftrap/scenarios.hpp"

using namespace dftrap;

namespace {

struct WorkerGuard {
  ~WorkerGuard() { set_worker_count(0); }
};

}  // namespace

TEST_CASE("boundary trace") {
  WorkerGuard g;
  std::vector<double> q;
  for (int i = 1; i <= 40; ++i) q.push_back(0.3 * i / 40);
  mathieu::ScanOptions ser;
  ser.exec = Execution::serial;
  const auto ref = mathieu::boundary_trace(q, mathieu::Side::lower, ser);
  for (int w : {1, 2, 4}) {
    set_worker_count(w);
    CHECK(mathieu::boundary_trace(q, mathieu::Side::lower) == ref);
  }
}

TEST_CASE("PSD grid") {
  WorkerGuard g;
  const auto cfg = config::preset("paper");
  auto c = scenarios::cooling_axis(cfg, Axis::z);
  const auto nb = scenarios::noise_budget(cfg);
  c.gamma_ion = nb.gamma_ion;
  c.gamma_np = nb.gamma_np;
  const auto m = scenarios::cooling_masses(cfg);
  const auto f = cooling::force_psds(nb, m);
  const auto grid = cooling::default_psd_grid(c);
  std::vector<double> si, sn;
  cooling::psd_on_grid(c, f, m, grid, si, sn, Execution::serial);
  for (int w : {1, 2, 4}) {
    set_worker_count(w);
    std::vector<double> pi, pn;
    cooling::psd_on_grid(c, f, m, grid, pi, pn);
    CHECK(pi == si);
    CHECK(pn == sn);
  }
}

TEST_CASE("temperatures") {
  WorkerGuard g;
  const auto cfg = config::preset("paper");
  cooling::TemperatureOptions ser;
  ser.exec = Execution::serial;
  const auto c = scenarios::cooling_axis(cfg, Axis::x);
  const auto nb = scenarios::noise_budget(cfg);
  const auto m = scenarios::cooling_masses(cfg);
  const auto ref = cooling::displacement_psd_and_temperature(c, nb, m, cooling::Method::spectral, ser);
  for (int w : {1, 4}) {
    set_worker_count(w);
    const auto r = cooling::displacement_psd_and_temperature(c, nb, m, cooling::Method::spectral);
    CHECK(r.T_ion == ref.T_ion);
    CHECK(r.T_np == ref.T_np);
  }
}

TEST_CASE("cold equilibrium curve") {
  WorkerGuard g;
  const auto cfg = config::preset("paper");
  const auto line = scenarios::equilibrium_line(cfg);
  const auto p = scenarios::equilibrium_problem(cfg);
  equilibrium::CurveOptions opt;
  opt.warm_start = false;
  opt.exec = Execution::serial;
  const auto ref = equilibrium::ion_position_curve(line, p, opt);
  opt.exec = Execution::parallel;
  for (int w : {1, 2, 4}) {
    set_worker_count(w);
    const auto r = equilibrium::ion_position_curve(line, p, opt);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i].ion_position == ref[i].ion_position);
  }
}

TEST_CASE("Floquet escape sample") {
  WorkerGuard g;
  const auto cfg = config::preset("paper");
  const auto pts = scenarios::floquet_sample(cfg.seed, 8, 0.005);
  CHECK(scenarios::floquet_sample(cfg.seed, 8, 0.005).front().q == pts.front().q);
  scenarios::FloquetProbe probe;
  probe.fast_periods = 300;
  const auto ref = scenarios::floquet_escapes(cfg, pts, probe, Execution::serial);
  for (int w : {1, 3}) {
    set_worker_count(w);
    CHECK(scenarios::floquet_escapes(cfg, pts, probe, Execution::parallel) == ref);
  }
}
