#pragma once

// Time-domain motion of one or two point charges in the dual-frequency
// quadrupole plus DC terms and their mutual Coulomb force. Fixed-step RK4.

#include <array>
#include <optional>
#include <vector>

#include "dftrap/parallel.hpp"
#include "dftrap/trap_model.hpp"
#include "dftrap/types.hpp"

namespace dftrap::dynamics {

inline constexpr double kHardCore = 10e-9;  // m
inline constexpr int kDefaultStepsPerFastPeriod = 200;

struct FieldModel {
  TrapConfig trap;
  std::vector<ParticleSpec> particles;  // one or two
  double axial_rf_gain = 0.0;           // slow-field leakage onto z, phenomenological
  bool include_coulomb = true;
  /// Take each particle's axial frequency from omega_sec[z] instead of the endcap curvature.
  bool axial_from_secular = false;

  void validate() const;
  std::size_t count() const { return particles.size(); }
  /// Axial DC angular frequency acting on particle i (0 if unconfined).
  double axial_omega(std::size_t i) const;
  /// Radial drive voltage seen at time t (fast + slow + static quadrupole bias).
  double quad_voltage(double t) const;
};

struct TwoParticleState {
  std::array<Vec3, 2> r{Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, 2> v{Vec3::Zero(), Vec3::Zero()};
  double t = 0.0;
};

struct Forces {
  std::array<Vec3, 2> f{Vec3::Zero(), Vec3::Zero()};
};

/// Sum of RF quadrupole, axial leakage, DC axial curvature, static fields and
/// (optionally) Coulomb. Throws SingularityError inside the hard core.
Forces force(const TwoParticleState& s, const FieldModel& field, double t);

/// Energy in the static part of the field (drives must be off for conservation).
double total_energy(const TwoParticleState& s, const FieldModel& field);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<TwoParticleState> samples;
  bool escaped = false;
  std::optional<double> escape_time;
  std::size_t particle_count = 1;
};

struct IntegrateOptions {
  double escape_radius = 0.0;  // 0 means 10 r0
  /// Record only samples with t >= record_from (transients can be skipped).
  double record_from = 0.0;
};

/// dt must resolve the fast drive (dt <= T_fast / 50) when it is active.
TrajectoryRecord integrate(const TwoParticleState& initial, const FieldModel& field, double dt,
                           double t_end, int sample_every, const IntegrateOptions& opt = {});

/// Largest escape excursion only, no samples kept. Cheaper for threshold probes.
bool escapes(const TwoParticleState& initial, const FieldModel& field, double dt, double t_end,
             double escape_radius = 0.0);

/// Amplitude of the Omega_slow Fourier component of one coordinate, taken over the
/// last whole number of slow periods in the record. Needs >= 10 slow periods.
double slow_micromotion_amplitude(const TrajectoryRecord& rec, const FieldModel& field, Axis axis,
                                  std::size_t particle = 0);

struct EscapeOptions {
  double tol = 1.0;                    // V
  double horizon_slow_periods = 50.0;
  int steps_per_fast_period = 50;
  Vec3 initial_offset{1e-6, 1e-6, 0.0};
  Execution exec = Execution::parallel;
};

/// Smallest v_slow (amplitude, V) in [lo, hi] at which particle 0 escapes within the
/// horizon. Each round evaluates three probes that split the bracket in quarters.
double escape_threshold(const FieldModel& field_template, double v_slow_lo, double v_slow_hi,
                        const EscapeOptions& opt = {});

}  // namespace dftrap::dynamics
