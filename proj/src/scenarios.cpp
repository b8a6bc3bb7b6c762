#include "dftrap/scenarios.hpp"

#include <cmath>
#include <exception>
#include <random>

#include <fmt/core.h>

#include "dftrap/constants.hpp"
#include "dftrap/errors.hpp"
#include "dftrap/mathieu.hpp"

namespace dftrap::scenarios {

using constants::two_pi;

double q_per_volt(const TrapConfig& t, const ParticleSpec& p, double omega) {
  if (!(omega > 0.0)) throw DomainError("q_per_volt: frequency must be positive");
  return 2.0 * t.kappa_geo * std::abs(p.charge_coulomb()) / (p.mass * t.r0 * t.r0 * omega * omega);
}

ParticleSpec without_secular(ParticleSpec p) {
  p.omega_sec.reset();
  return p;
}

std::vector<FloquetPoint> floquet_sample(std::uint64_t seed, int n, double margin) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uq(0.05, 0.85), ua(-0.25, 0.25);
  std::vector<FloquetPoint> pts;
  while (static_cast<int>(pts.size()) < n) {
    const double q = uq(rng), a = ua(rng);
    const bool v = mathieu::co_stable(a, q);
    if (mathieu::co_stable(a - margin, q) != v || mathieu::co_stable(a + margin, q) != v) continue;
    pts.push_back({q, a, v});
  }
  return pts;
}

dynamics::FieldModel floquet_field(const config::RunConfig& cfg, double a, double q) {
  dynamics::FieldModel f;
  f.trap = cfg.trap;
  const ParticleSpec ion = without_secular(cfg.ion());
  const double k = q_per_volt(f.trap, ion, f.trap.omega_fast);
  f.trap.v_fast = q / k;
  // a = 4 kappa Q U / (m r0^2 Omega^2) = 2 k U
  f.trap.v_dc_quad = a / (2.0 * k) * (ion.charge > 0 ? 1.0 : -1.0);
  f.trap.v_slow = 0.0;
  f.trap.v_endcap = 0.0;
  f.trap.v_comp = {0.0, 0.0};
  f.trap.endcap_bias = 0.0;
  f.particles = {ion};
  return f;
}

std::vector<char> floquet_escapes(const config::RunConfig& cfg, const std::vector<FloquetPoint>& pts,
                                  const FloquetProbe& probe, Execution exec) {
  std::vector<char> esc(pts.size(), 0);
  auto run_one = [&](long i) {
    const dynamics::FieldModel f = floquet_field(cfg, pts[i].a, pts[i].q);
    const double period = two_pi / f.trap.omega_fast;
    dynamics::TwoParticleState s;
    s.r[0] = Vec3(1e-6, 1e-6, 0.0);
    esc[i] = dynamics::escapes(s, f, period / probe.steps_per_period, probe.fast_periods * period,
                               probe.escape_radius);
  };
  const long n = static_cast<long>(pts.size());
  if (exec == Execution::serial) {
    for (long i = 0; i < n; ++i) run_one(i);
    return esc;
  }
  std::vector<std::exception_ptr> errs(pts.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (long i = 0; i < n; ++i) {
    try {
      run_one(i);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return esc;
}

OffsetMicromotion offset_micromotion(const config::RunConfig& cfg) {
  const auto& mm = cfg.micromotion;
  const ParticleSpec ion = without_secular(cfg.ion());
  dynamics::FieldModel f;
  f.trap = cfg.trap;
  if (!(f.trap.comp_gain != 0.0)) throw ConfigError("micromotion: trap.comp_gain must be non-zero");
  f.trap.v_fast = 0.0;
  f.trap.v_endcap = 0.0;
  f.trap.endcap_bias = 0.0;
  f.trap.v_dc_quad = 0.0;
  f.trap.v_slow = mm.q_slow / q_per_volt(f.trap, ion, f.trap.omega_slow);
  f.particles = {ion};
  // pseudopotential stiffness sets the field that parks the ion at `offset`
  const double w = f.trap.omega_slow * mm.q_slow / (2.0 * std::sqrt(2.0));
  const double e_x = ion.mass * w * w * mm.offset / ion.charge_coulomb();
  f.trap.v_comp = {e_x / f.trap.comp_gain, 0.0};

  const double period = two_pi / f.trap.omega_slow;
  dynamics::TwoParticleState s;
  // leading-order micromotion along x is x0 (1 + q/2 cos Omega t), so start on it
  s.r[0] = Vec3(mm.offset * (1.0 + mm.q_slow / 2.0), 0.0, 0.0);
  OffsetMicromotion out;
  out.record = dynamics::integrate(s, f, period / 400.0, mm.offset_periods * period, 1);
  if (out.record.escaped) throw ConvergenceError("micromotion: ion escaped from the slow-drive well");
  out.q_slow = mm.q_slow;
  out.amplitude = dynamics::slow_micromotion_amplitude(out.record, f, Axis::x);
  // mean over the same whole-period window the amplitude uses
  const double t_start = out.record.times.back() -
                         std::floor((out.record.times.back() - out.record.times.front()) / period + 1e-9) * period;
  double sum = 0.0;
  long count = 0;
  for (std::size_t k = 0; k + 1 < out.record.times.size(); ++k)
    if (out.record.times[k] >= t_start - 1e-12 * period) {
      sum += out.record.samples[k].r[0].x();
      ++count;
    }
  out.x0 = sum / static_cast<double>(count);
  out.expected = 0.5 * mm.q_slow * out.x0;
  return out;
}

std::vector<AxialPoint> axial_micromotion(const config::RunConfig& cfg, Execution exec) {
  const auto& mm = cfg.micromotion;
  const ParticleSpec ion = without_secular(cfg.ion());
  dynamics::FieldModel base;
  base.trap = cfg.trap;
  base.trap.v_fast = mm.q / q_per_volt(base.trap, ion, base.trap.omega_fast);
  base.trap.v_slow = std::abs(v_slow_for_a_eff(base.trap, ion, mm.a_eff));
  base.trap.v_comp = {0.0, 0.0};
  base.axial_rf_gain = mm.axial_rf_gain;
  base.particles = {ion};
  const double wz = endcap_axial_frequency(base.trap, ion);
  if (!(wz > 0.0)) throw ConfigError("micromotion: the endcap gives no axial confinement");
  const double period = two_pi / base.trap.omega_slow;
  const double dt = two_pi / base.trap.omega_fast / mm.steps_per_fast_period;

  std::vector<AxialPoint> out(mm.endcap_biases.size());
  auto run_one = [&](long i) {
    dynamics::FieldModel f = base;
    f.trap.endcap_bias = mm.endcap_biases[i];
    const double z0 = ion.charge_coulomb() * f.trap.static_field().z() / (ion.mass * wz * wz);
    dynamics::TwoParticleState s;
    s.r[0] = Vec3(0.0, 0.0, z0);
    const auto rec = dynamics::integrate(s, f, dt, mm.axial_periods * period, mm.steps_per_fast_period);
    if (rec.escaped)
      throw ConvergenceError(fmt::format("micromotion: ion escaped at endcap bias {} V", mm.endcap_biases[i]));
    out[i] = {mm.endcap_biases[i], z0, dynamics::slow_micromotion_amplitude(rec, f, Axis::z)};
  };
  const long n = static_cast<long>(out.size());
  if (exec == Execution::serial) {
    for (long i = 0; i < n; ++i) run_one(i);
    return out;
  }
  std::vector<std::exception_ptr> errs(out.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (long i = 0; i < n; ++i) {
    try {
      run_one(i);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

equilibrium::EquilibriumProblem equilibrium_problem(const config::RunConfig& cfg) {
  equilibrium::EquilibriumProblem p;
  p.ion = cfg.ion();
  p.np_position = Vec3(cfg.equilibrium.np_position.data());
  p.np_charge = cfg.equilibrium.np_charge;
  p.static_field = Vec3(cfg.equilibrium.static_field.data());
  return p;
}

std::vector<Vec3> equilibrium_line(const config::RunConfig& cfg) {
  const auto& e = cfg.equilibrium;
  if (e.line_points < 2) throw ConfigError("equilibrium: line needs at least 2 points");
  std::vector<Vec3> pts;
  for (int i = 0; i < e.line_points; ++i)
    pts.emplace_back(e.line_x_min + (e.line_x_max - e.line_x_min) * i / (e.line_points - 1), 0.0, e.line_z);
  return pts;
}

equilibrium::PairConfig pair_config(const config::RunConfig& cfg) {
  return {cfg.trap, cfg.ion(), cfg.nanoparticle(), std::nullopt, std::nullopt};
}

modes::CoupledOscillator cooling_axis(const config::RunConfig& cfg, Axis axis) {
  return modes::axis_oscillator(axis, cfg.ion(), cfg.cooling_nanoparticle(), 0.0, 0.0);
}

cooling::NoiseBudget noise_budget(const config::RunConfig& cfg) {
  const double m = cfg.ion().mass;
  return {cooling::recoil_heating(cfg.laser, m), cfg.noise.heating_np, cooling::doppler_rate(cfg.laser, m),
          cfg.noise.gamma_np};
}

cooling::Masses cooling_masses(const config::RunConfig& cfg) {
  return {cfg.ion().mass, cfg.cooling_nanoparticle().mass};
}

}  // namespace dftrap::scenarios
