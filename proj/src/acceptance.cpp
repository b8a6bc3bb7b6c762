#include "dftrap/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "dftrap/constants.hpp"
#include "dftrap/cooling.hpp"
#include "dftrap/csv.hpp"
#include "dftrap/dynamics.hpp"
#include "dftrap/equilibrium.hpp"
#include "dftrap/mathieu.hpp"
#include "dftrap/modes.hpp"
#include "dftrap/parallel.hpp"
#include "dftrap/scenarios.hpp"

namespace dftrap::acceptance {

namespace {

using constants::two_pi;
using namespace scenarios;

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

// Collects sub-checks; the criterion passes only when every one holds.
struct Checks {
  bool ok = true;
  std::vector<std::string> parts;
  void add(bool pass, std::string text) {
    ok = ok && pass;
    parts.push_back(pass ? std::move(text) : "FAIL " + std::move(text));
  }
  std::string join() const {
    std::string s;
    for (const auto& p : parts) s += (s.empty() ? "" : "; ") + p;
    return s;
  }
};

CriterionResult finish(int id, const char* name, const Checks& c) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  r.passed = c.ok;
  r.detail = c.join();
  return r;
}

constexpr int kFloquetPoints = 50;
constexpr double kFloquetMargin = 0.005;

}  // namespace

std::string format_line(const CriterionResult& r) {
  return fmt::format("[{}] {} {} ({:.2f} s): {}", r.passed ? "PASS" : "FAIL", r.id, r.name, r.seconds, r.detail);
}

CriterionResult stability_parameters(const config::RunConfig& cfg) {
  Checks c;
  const double q = q_param(cfg.trap, cfg.ion(), Drive::fast);
  c.add(std::abs(q - 0.55) <= 0.03, fmt::format("q_ion = {:.4f} (0.55 +- 0.03)", q));
  const SecularFrequency w = secular_frequency(cfg.trap, cfg.nanoparticle(), Drive::slow);
  const double f = w.omega / two_pi;
  c.add(rel(f, 1.5e3) <= 0.15 && !w.outside_validity,
        fmt::format("nanoparticle slow secular = {:.1f} Hz at q = {:.3f} (1.5 kHz +- 15%)", f, w.q));
  return finish(1, "stability-parameters", c);
}

CriterionResult mathieu_boundary(const config::RunConfig& cfg) {
  Checks c;
  const int n = std::max(2, cfg.stability.boundary_points);
  std::vector<double> qs(n);
  for (int i = 0; i < n; ++i) qs[i] = 0.3 * (i + 1) / n;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> lo = mathieu::boundary_trace(qs, mathieu::Side::lower);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0.0, at = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = rel(std::abs(lo[i]), qs[i] * qs[i] / 2.0);
    if (d > worst) worst = d, at = qs[i];
  }
  c.add(worst <= 0.10, fmt::format("|a_low| vs q^2/2 over {} q in (0, 0.3]: max dev {:.2f}% at q = {:.3f}", n,
                                   100.0 * worst, at));
  c.add(secs < 30.0, fmt::format("{}-point trace {:.1f} s", n, secs));

  for (const auto& m : cfg.stability.measured) {
    TrapConfig t = cfg.trap;
    t.v_fast = m.v_fast;
    t.v_slow = m.v_slow_max;
    const double q_model = q_param(t, cfg.ion(), Drive::fast);
    const double a = a_eff_param(t, cfg.ion());
    const double q = 0.55;
    // the slow drive shifts y by -a, so co-trapping ends on the lower (a0) edge
    const double edge = mathieu::boundary_a_for_q(q, mathieu::Side::lower);
    const double gap = std::abs(a) - std::abs(edge);
    c.add(std::abs(gap) <= 0.02,
          fmt::format("threshold at {:.0f} Vpp: a_eff = {:.4f}, |edge(q={})| = {:.4f}, gap {:+.4f} (+-0.02); "
                      "trap-model q = {:.4f}, |edge| there {:.4f}",
                      2.0 * m.v_slow_max, a, q, std::abs(edge), gap, q_model,
                      std::abs(mathieu::boundary_a_for_q(q_model, mathieu::Side::lower))));
  }
  return finish(2, "mathieu-boundary", c);
}

CriterionResult dynamics_floquet(const config::RunConfig& cfg) {
  Checks c;
  const auto pts = floquet_sample(cfg.seed, kFloquetPoints, kFloquetMargin);
  const FloquetProbe probe;
  const auto esc = floquet_escapes(cfg, pts, probe);
  int agree = 0, stable = 0;
  std::string bad;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    stable += pts[i].stable;
    if (static_cast<bool>(esc[i]) != pts[i].stable)
      ++agree;
    else
      bad += fmt::format(" (a={:.4f}, q={:.4f})", pts[i].a, pts[i].q);
  }
  c.add(agree == kFloquetPoints,
        fmt::format("{}/{} verdicts agree ({} stable, {} unstable; {} fast periods, margin {}){}", agree,
                    kFloquetPoints, stable, kFloquetPoints - stable, probe.fast_periods, kFloquetMargin, bad));
  return finish(3, "dynamics-floquet", c);
}

CriterionResult micromotion(const config::RunConfig& cfg) {
  Checks c;
  const auto off = offset_micromotion(cfg);
  c.add(rel(off.amplitude, off.expected) <= 0.10,
        fmt::format("q_slow = {}: amplitude {:.4g} m vs (q/2) x0 = {:.4g} m (x0 = {:.4g} m), dev {:.2f}%", off.q_slow,
                    off.amplitude, off.expected, off.x0, 100.0 * rel(off.amplitude, off.expected)));
  const auto ax = axial_micromotion(cfg);
  bool mono = ax.size() >= 4;
  std::string table;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    if (i > 0) mono = mono && ax[i].amplitude > ax[i - 1].amplitude;
    table += fmt::format("{}z={:.2f}um:{:.3g}m", i ? ", " : "", 1e6 * ax[i].z0, ax[i].amplitude);
  }
  c.add(mono, fmt::format("axial leakage g = {}: amplitude strictly increasing over {} positions [{}]",
                          cfg.micromotion.axial_rf_gain, ax.size(), table));
  return finish(4, "micromotion", c);
}

CriterionResult equilibrium_case3(const config::RunConfig& cfg) {
  Checks c;
  const auto p = equilibrium_problem(cfg);
  const auto s = equilibrium::solve_ion_equilibrium(p);
  const double z = s.ion_position.z();
  c.add(std::abs(z - 45.9e-6) <= 1e-6 && std::abs(s.ion_position.x()) <= 1e-6,
        fmt::format("ion at [{:.2f}, {:.2f}] um (z = 45.9 +- 1)", 1e6 * s.ion_position.x(), 1e6 * z));
  const double wz = (*p.ion.omega_sec)[2];
  const double rhs = constants::coulomb_k * p.ion.charge_coulomb() * p.np_charge * constants::elementary_charge /
                     (p.ion.mass * wz * wz);
  const double d = -p.np_position.z();  // nanoparticle depth below the centre
  const double cubic = std::abs(z * (z + d) * (z + d) - rhs) / rhs;
  c.add(cubic < 1e-3, fmt::format("on-axis cubic residual {:.2e} relative", cubic));
  for (double x : {50e-6, -50e-6}) {
    auto q = p;
    q.np_position = Vec3(x, 0.0, 0.0);
    const auto r = equilibrium::solve_ion_equilibrium(q);
    c.add(r.ion_position.norm() <= 2e-6, fmt::format("np at x = {:+.0f} um: ion {:.2f} um from origin", 1e6 * x,
                                                     1e6 * r.ion_position.norm()));
  }
  return finish(5, "equilibrium-case-III", c);
}

CriterionResult mode_table(const config::RunConfig& cfg) {
  Checks c;
  const auto mx = modes::eigenmodes(cooling_axis(cfg, Axis::x));
  const auto mz = modes::eigenmodes(cooling_axis(cfg, Axis::z));
  struct Row {
    const char* label;
    const modes::Mode& m;
    double f;
  };
  for (const Row& r : {Row{"x in", mx.in, 3.92e6}, Row{"x out", mx.out, 1.5e3}, Row{"z in", mz.in, 1.0e3},
                       Row{"z out", mz.out, 1.38e6}}) {
    const double d = rel(r.m.freq_hz(), r.f);
    c.add(d <= 0.005, fmt::format("{} {:.5g} Hz ({:.3g}%)", r.label, r.m.freq_hz(), 100.0 * d));
  }
  auto ratio = [](const modes::Mode& m) {
    const double a = std::abs(m.evec[0]), b = std::abs(m.evec[1]);
    return std::min(a, b) / std::max(a, b);
  };
  const double rx = ratio(mx.out), rz = ratio(mz.in);
  c.add(rel(rx, 0.04) <= 0.05, fmt::format("x out ratio {:.4f} (0.04 +- 5%)", rx));
  c.add(rel(rz, 0.67) <= 0.05, fmt::format("z in ratio {:.4f} (0.67 +- 5%)", rz));
  const auto rep = modes::mu_zero_limit_check(
      {{"x", cooling_axis(cfg, Axis::x)}, {"y", cooling_axis(cfg, Axis::y)}, {"z", cooling_axis(cfg, Axis::z)}});
  for (const auto& e : rep.entries) c.add(e.rel_dev < 1e-4, fmt::format("mu->0 {} {:.2e}", e.label, e.rel_dev));
  return finish(6, "mode-table", c);
}

CriterionResult cooling_temperatures(const config::RunConfig& cfg) {
  Checks c;
  const double m_ion = cfg.ion().mass;
  const double gd = cooling::doppler_rate(cfg.laser, m_ion);
  c.add(rel(gd, two_pi * 10e3) <= 0.10, fmt::format("gamma_D = 2pi x {:.3f} kHz", gd / two_pi / 1e3));
  const double edot = cooling::recoil_heating(cfg.laser, m_ion);
  c.add(rel(edot, 3.8e-22) <= 0.15, fmt::format("E_i = {:.4g} J/s (3.8e-22 +- 15%)", edot));
  const auto nb = noise_budget(cfg);
  const double t_closed = nb.heating_np / (nb.gamma_np * constants::boltzmann);
  c.add(rel(t_closed, 4680.0) <= 0.02, fmt::format("uncoupled T_np = {:.1f} K (closed form)", t_closed));

  const auto masses = cooling_masses(cfg);
  auto both = [&](const modes::CoupledOscillator& osc, const char* label, double target, double tol) {
    const auto sp = cooling::displacement_psd_and_temperature(osc, nb, masses, cooling::Method::spectral);
    const auto ly = cooling::displacement_psd_and_temperature(osc, nb, masses, cooling::Method::lyapunov);
    c.add(rel(ly.T_np, target) <= tol,
          fmt::format("{} T_np = {:.4g} K ({:.4g} +- {:.0f}%)", label, ly.T_np, target, 100.0 * tol));
    const double dn = rel(sp.T_np, ly.T_np), di = rel(sp.T_ion, ly.T_ion);
    c.add(dn <= 0.02 && di <= 0.02,
          fmt::format("{} spectral/Lyapunov T_np {:.4g}/{:.4g}, T_ion {:.4g}/{:.4g}", label, sp.T_np, ly.T_np,
                      sp.T_ion, ly.T_ion));
  };
  auto free = cooling_axis(cfg, Axis::x);
  free.coupling_j = 0.0;
  both(free, "uncoupled", t_closed, 0.02);
  both(cooling_axis(cfg, Axis::x), "x", 2280.0, 0.15);
  both(cooling_axis(cfg, Axis::z), "z", 17.0, 0.20);
  return finish(7, "cooling", c);
}

CriterionResult properties(const config::RunConfig& cfg) {
  Checks c;
  {
    double worst = 0.0;
    for (int i = 0; i <= 9; ++i)
      for (int k = -6; k <= 6; ++k) worst = std::max(worst, std::abs(mathieu::monodromy(0.05 * k, 0.1 * i).det - 1.0));
    c.add(worst <= 1e-9, fmt::format("monodromy |det - 1| <= {:.1e}", worst));
  }
  {
    dynamics::FieldModel f;
    f.trap = cfg.trap;
    f.trap.v_fast = f.trap.v_slow = 0.0;
    f.particles = {without_secular(cfg.ion()), without_secular(cfg.nanoparticle())};
    dynamics::TwoParticleState s;
    s.r[0] = Vec3(0.0, 0.0, 50e-6);
    s.r[1] = Vec3(0.0, 0.0, 1e-6);
    const double dt = two_pi / f.axial_omega(0) / 500.0;
    const long steps = 1'000'000;
    const double e0 = dynamics::total_energy(s, f);
    const auto rec = dynamics::integrate(s, f, dt, steps * dt, static_cast<int>(steps));
    const double drift = std::abs(dynamics::total_energy(rec.samples.back(), f) - e0) / std::abs(e0);
    c.add(drift <= 1e-6 && rec.samples.size() == 2, fmt::format("energy drift {:.2e} over {} steps", drift, steps));
  }
  {
    dynamics::FieldModel f;
    f.trap = cfg.trap;
    f.trap.v_fast = f.trap.v_slow = f.trap.v_endcap = 0.0;
    f.trap.v_comp = {0.0, 0.0};
    f.trap.endcap_bias = 0.0;
    f.particles = {without_secular(cfg.ion()), without_secular(cfg.nanoparticle())};
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-100e-6, 100e-6);
    bool exact = true;
    for (int i = 0; i < 200; ++i) {
      dynamics::TwoParticleState s;
      s.r[0] = Vec3(u(rng), u(rng), u(rng));
      s.r[1] = Vec3(u(rng), u(rng), u(rng));
      const auto fr = dynamics::force(s, f, 0.0);
      exact = exact && (fr.f[0] + fr.f[1]).cwiseAbs().maxCoeff() == 0.0;
    }
    c.add(exact, "Coulomb pair sums to exactly zero on 200 random pairs");
  }
  {
    double worst = std::numeric_limits<double>::infinity();
    int count = 0;
    auto p = equilibrium_problem(cfg);
    for (const Vec3& np : {p.np_position, Vec3(50e-6, 0, 0), Vec3(-50e-6, 0, 0)}) {
      auto q = p;
      q.np_position = np;
      worst = std::min(worst, equilibrium::solve_ion_equilibrium(q).min_curvature);
      ++count;
    }
    for (const auto& s : equilibrium::ion_position_curve(equilibrium_line(cfg), p)) {
      worst = std::min(worst, s.min_curvature);
      ++count;
    }
    for (const auto& s : equilibrium::run_schedule(cfg.schedule, pair_config(cfg))) {
      worst = std::min(worst, s.min_curvature);
      ++count;
    }
    c.add(worst > 0.0, fmt::format("Hessian positive definite at {} equilibria (min scaled eigenvalue {:.3g})",
                                   count, worst));
  }
  {
    const auto nb = noise_budget(cfg);
    double worst = std::numeric_limits<double>::infinity();
    for (Axis a : {Axis::x, Axis::y, Axis::z})
      worst = std::min(worst, cooling::displacement_psd_and_temperature(cooling_axis(cfg, a), nb, cooling_masses(cfg),
                                                                        cooling::Method::lyapunov)
                                  .min_covariance_eig);
    c.add(worst > 0.0, fmt::format("Lyapunov covariance positive definite (min correlation eigenvalue {:.3g})", worst));
  }
  {
    // identical artifacts from the serial reference and from 1 and 4 workers
    const int saved = worker_count();
    auto artifacts = [&](Execution exec) {
      std::string out;
      mathieu::ScanOptions so;
      so.exec = exec;
      const auto d = mathieu::stability_scan({0.0, 0.6}, {-0.2, 0.2}, 13, 9, so);
      out += csv::stability_points(d) + csv::stability_boundary(d.q_grid, d.a_boundary_low, d.a_boundary_high);
      const auto pts = floquet_sample(cfg.seed, 6, kFloquetMargin);
      const auto esc = floquet_escapes(cfg, pts, {}, exec);
      for (std::size_t i = 0; i < pts.size(); ++i) out += fmt::format("{},{},{}\n", pts[i].q, pts[i].a, +esc[i]);
      const auto osc = cooling_axis(cfg, Axis::x);
      cooling::TemperatureOptions to;
      to.exec = exec;
      to.psd_grid = cooling::default_psd_grid(osc, 10);
      const auto r = cooling::displacement_psd_and_temperature(osc, noise_budget(cfg), cooling_masses(cfg),
                                                               cooling::Method::spectral, to);
      out += csv::psd(r) + csv::temperatures({{"x", r.method, r.T_ion, r.T_np}});
      equilibrium::CurveOptions co;
      co.warm_start = false;
      co.exec = exec;
      const auto line = equilibrium_line(cfg);
      out += csv::equilibrium_curve(line, equilibrium::ion_position_curve(line, equilibrium_problem(cfg), co));
      return out;
    };
    std::string ref, one, four;
    try {
      ref = artifacts(Execution::serial);
      set_worker_count(1);
      one = artifacts(Execution::parallel);
      set_worker_count(4);
      four = artifacts(Execution::parallel);
    } catch (...) {
      set_worker_count(saved);
      throw;
    }
    set_worker_count(saved);
    c.add(ref == one && ref == four,
          fmt::format("serial, 1-worker and 4-worker artifacts byte-identical ({} bytes)", ref.size()));
  }
  return finish(8, "properties", c);
}

std::vector<CriterionResult> run(const config::RunConfig& cfg, const std::vector<int>& only,
                                 const std::function<void(const CriterionResult&)>& on_result) {
  using Fn = CriterionResult (*)(const config::RunConfig&);
  static const std::array<std::pair<const char*, Fn>, kCriterionCount> all{{
      {"stability-parameters", stability_parameters},
      {"mathieu-boundary", mathieu_boundary},
      {"dynamics-floquet", dynamics_floquet},
      {"micromotion", micromotion},
      {"equilibrium-case-III", equilibrium_case3},
      {"mode-table", mode_table},
      {"cooling", cooling_temperatures},
      {"properties", properties},
  }};
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = all[id - 1].second(cfg);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = all[id - 1].first;
      r.passed = false;
      r.detail = fmt::format("error: {}", e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dftrap::acceptance
