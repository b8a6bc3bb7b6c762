#pragma once

// Trap and particle parameters plus the closed-form pseudopotential algebra of a
// dual-frequency linear Paul trap. All quantities are SI; voltages are
// zero-to-peak amplitudes and frequencies are angular (rad/s).

#include <array>
#include <optional>

#include "dftrap/types.hpp"

namespace dftrap {

enum class Drive { slow, fast };

struct TrapConfig {
  double r0 = 0.9e-3;          ///< electrode-to-axis distance (m)
  double kappa_geo = 0.93;     ///< geometric efficiency factor, (0, 1]
  double omega_slow = 0.0;     ///< rad/s
  double omega_fast = 0.0;     ///< rad/s
  double v_slow = 0.0;         ///< V, amplitude
  double v_fast = 0.0;         ///< V, amplitude
  double v_endcap = 0.0;       ///< V, common endcap voltage (axial DC curvature)
  std::array<double, 2> v_comp{0.0, 0.0};  ///< V, compensation pair (x, y)
  double comp_gain = 0.0;      ///< (V/m) per V of compensation voltage
  double axial_gain = 0.0;     ///< dimensionless axial curvature calibration

  // Extras used by the time-domain and static solvers.
  double endcap_bias = 0.0;        ///< V, extra voltage on the +z endcap
  double endcap_field_gain = 0.0;  ///< (V/m) per V of endcap bias, field points to -z
  double v_dc_quad = 0.0;          ///< V, static radial quadrupole bias (Mathieu "a" term)
  double slow_phase = 0.0;         ///< rad, phase of the slow drive at t = 0

  /// Throws DomainError when an invariant is violated.
  void validate() const;

  /// Uniform static field from the compensation electrodes and the endcap bias (V/m).
  Vec3 static_field() const;

  bool operator==(const TrapConfig&) const = default;
};

struct ParticleSpec {
  int charge = 1;      ///< multiples of e
  double mass = 0.0;   ///< kg
  /// Per-axis secular angular frequencies (rad/s). When present, these replace
  /// the values derived from the trap in the static solvers, and the z entry
  /// replaces the endcap-derived axial frequency in the dynamics.
  std::optional<std::array<double, 3>> omega_sec;

  double charge_coulomb() const;
  void validate() const;

  bool operator==(const ParticleSpec&) const = default;
};

struct StabilityParams {
  double a_eff = 0.0;
  double q = 0.0;
};

/// Mathieu q of `p` for the selected drive: 2 kappa |Q V| / (m r0^2 Omega^2).
double q_param(const TrapConfig& trap, const ParticleSpec& p, Drive which);

/// Effective a from the slow amplitude and the fast frequency:
/// 4 kappa Q V_slow / (m r0^2 Omega_fast^2). Sign follows Q * V_slow.
double a_eff_param(const TrapConfig& trap, const ParticleSpec& p);

StabilityParams stability_params(const TrapConfig& trap, const ParticleSpec& p);

/// Inverse of a_eff_param: slow amplitude that yields the given a_eff.
double v_slow_for_a_eff(const TrapConfig& trap, const ParticleSpec& p, double a_eff);

struct SecularFrequency {
  double omega = 0.0;              ///< rad/s
  double q = 0.0;
  bool outside_validity = false;   ///< q at or above the pseudopotential guard
};

inline constexpr double kDefaultPseudopotentialGuard = 0.9;

/// Single-drive pseudopotential frequency Omega q / (2 sqrt 2). Large q raises
/// a flag instead of failing.
SecularFrequency secular_frequency(const TrapConfig& trap, const ParticleSpec& p, Drive which,
                                   double q_guard = kDefaultPseudopotentialGuard);

/// omega|fast / omega|slow for a particle trapped by the slow drive:
/// (Omega_slow / Omega_fast) (V_fast / V_slow). Independent of the particle.
double fast_to_slow_stiffness_ratio(const TrapConfig& trap);

/// Small-q co-trapping condition |a_eff| < q^2 / 2. This is only the leading
/// order of the first Mathieu boundary; use mathieu::boundary_a_for_q when
/// precision matters.
bool approx_stability_check(const StabilityParams& sp);

/// Axial angular frequency from the endcap curvature,
/// omega_z^2 = 2 axial_gain Q V_endcap / (m r0^2). Returns 0 without confinement.
double endcap_axial_frequency(const TrapConfig& trap, const ParticleSpec& p);

namespace presets {

/// Co-trapping working point: 0.9 mm trap, 17.5 MHz / 2.5 kVpp fast, 7 kHz / 150 Vpp slow.
TrapConfig reference_trap();
/// 40Ca+ with secular frequencies 4, 4, 0.8 MHz (x, y, z).
ParticleSpec calcium_ion();
/// Silica nanoparticle, Q = 800 e, m = 2e-17 kg, secular 1.5, 1.5, 1.0 kHz.
ParticleSpec nanoparticle();
/// Same particle with the lighter mass estimate, m = 1.6e-17 kg.
ParticleSpec nanoparticle_light();

}  // namespace presets

}  // namespace dftrap
