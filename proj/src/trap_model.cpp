#include "dftrap/trap_model.hpp"

#include <cmath>
#include <numbers>

#include "dftrap/constants.hpp"
#include "dftrap/errors.hpp"

namespace dftrap {

const char* to_string(Axis a) {
  switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

void TrapConfig::validate() const {
  if (!(r0 > 0.0)) throw DomainError("trap: r0 must be positive");
  if (!(kappa_geo > 0.0 && kappa_geo <= 1.0)) throw DomainError("trap: kappa_geo must lie in (0, 1]");
  if (!(omega_slow > 0.0)) throw DomainError("trap: omega_slow must be positive");
  if (!(omega_fast > omega_slow)) throw DomainError("trap: omega_fast must exceed omega_slow");
  if (v_slow < 0.0 || v_fast < 0.0) throw DomainError("trap: drive amplitudes must be non-negative");
}

Vec3 TrapConfig::static_field() const {
  return {comp_gain * v_comp[0], comp_gain * v_comp[1], -endcap_field_gain * endcap_bias};
}

double ParticleSpec::charge_coulomb() const { return charge * constants::elementary_charge; }

void ParticleSpec::validate() const {
  if (charge == 0) throw DomainError("particle: charge must be non-zero");
  if (!(mass > 0.0)) throw DomainError("particle: mass must be positive");
  if (omega_sec) {
    for (double w : *omega_sec)
      if (!(w > 0.0)) throw DomainError("particle: secular frequencies must be positive");
  }
}

namespace {

double drive_amplitude(const TrapConfig& t, Drive d) { return d == Drive::slow ? t.v_slow : t.v_fast; }
double drive_frequency(const TrapConfig& t, Drive d) { return d == Drive::slow ? t.omega_slow : t.omega_fast; }

double mathieu_scale(const TrapConfig& t, const ParticleSpec& p, double omega) {
  if (!(omega > 0.0)) throw DomainError("drive frequency must be positive");
  if (!(t.r0 > 0.0)) throw DomainError("r0 must be positive");
  return t.kappa_geo * p.charge_coulomb() / (p.mass * t.r0 * t.r0 * omega * omega);
}

}  // namespace

double q_param(const TrapConfig& trap, const ParticleSpec& p, Drive which) {
  const double s = mathieu_scale(trap, p, drive_frequency(trap, which));
  return std::abs(2.0 * s * drive_amplitude(trap, which));
}

double a_eff_param(const TrapConfig& trap, const ParticleSpec& p) {
  return 4.0 * mathieu_scale(trap, p, trap.omega_fast) * trap.v_slow;
}

StabilityParams stability_params(const TrapConfig& trap, const ParticleSpec& p) {
  return {a_eff_param(trap, p), q_param(trap, p, Drive::fast)};
}

double v_slow_for_a_eff(const TrapConfig& trap, const ParticleSpec& p, double a_eff) {
  return a_eff / (4.0 * mathieu_scale(trap, p, trap.omega_fast));
}

SecularFrequency secular_frequency(const TrapConfig& trap, const ParticleSpec& p, Drive which,
                                   double q_guard) {
  SecularFrequency out;
  out.q = q_param(trap, p, which);
  out.omega = drive_frequency(trap, which) * out.q / (2.0 * std::numbers::sqrt2);
  out.outside_validity = out.q >= q_guard;
  return out;
}

double fast_to_slow_stiffness_ratio(const TrapConfig& trap) {
  if (!(trap.v_slow > 0.0)) throw DomainError("stiffness ratio needs v_slow > 0");
  if (!(trap.omega_fast > 0.0)) throw DomainError("stiffness ratio needs omega_fast > 0");
  return (trap.omega_slow / trap.omega_fast) * (trap.v_fast / trap.v_slow);
}

bool approx_stability_check(const StabilityParams& sp) {
  return std::abs(sp.a_eff) < 0.5 * sp.q * sp.q;
}

double endcap_axial_frequency(const TrapConfig& trap, const ParticleSpec& p) {
  const double w2 =
      2.0 * trap.axial_gain * p.charge_coulomb() * trap.v_endcap / (p.mass * trap.r0 * trap.r0);
  return w2 > 0.0 ? std::sqrt(w2) : 0.0;
}

namespace presets {

TrapConfig reference_trap() {
  TrapConfig t;
  t.r0 = 0.9e-3;
  t.kappa_geo = 0.93;
  t.omega_slow = constants::two_pi * 7e3;
  t.omega_fast = constants::two_pi * 17.5e6;
  t.v_slow = 75.0;    // 150 Vpp
  t.v_fast = 1250.0;  // 2.5 kVpp
  t.v_endcap = 56.5;
  // Calibrated so the ion's endcap axial frequency is ~2 pi x 800 kHz at 56.5 V.
  t.axial_gain = 0.075;
  t.comp_gain = 10.0;
  t.endcap_field_gain = 10.0;
  return t;
}

ParticleSpec calcium_ion() {
  ParticleSpec p;
  p.charge = 1;
  p.mass = 6.64e-26;
  p.omega_sec = std::array<double, 3>{constants::two_pi * 4e6, constants::two_pi * 4e6,
                                      constants::two_pi * 0.8e6};
  return p;
}

ParticleSpec nanoparticle() {
  ParticleSpec p;
  p.charge = 800;
  p.mass = 2e-17;
  p.omega_sec = std::array<double, 3>{constants::two_pi * 1.5e3, constants::two_pi * 1.5e3,
                                      constants::two_pi * 1.0e3};
  return p;
}

ParticleSpec nanoparticle_light() {
  ParticleSpec p = nanoparticle();
  p.mass = 1.6e-17;
  return p;
}

}  // namespace presets

}  // namespace dftrap
