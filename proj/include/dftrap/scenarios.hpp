#pragma once

// Scenario builders shared by the command-line tool and the acceptance suite:
// each turns a RunConfig into the inputs of one module and runs it.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dftrap/config.hpp"
#include "dftrap/cooling.hpp"
#include "dftrap/dynamics.hpp"
#include "dftrap/equilibrium.hpp"
#include "dftrap/modes.hpp"

namespace dftrap::scenarios {

/// 2 kappa Q / (m r0^2 Omega^2): Mathieu q per volt of drive amplitude at omega.
double q_per_volt(const TrapConfig& t, const ParticleSpec& p, double omega);

ParticleSpec without_secular(ParticleSpec p);

// -- dynamics vs Floquet ------------------------------------------------------

struct FloquetPoint {
  double q = 0.0;
  double a = 0.0;
  bool stable = false;  // co_stable verdict
};

/// Seeded uniform draws in q in [0.05, 0.85], a in [-0.25, 0.25], keeping only
/// points whose verdict does not change at a +- margin.
std::vector<FloquetPoint> floquet_sample(std::uint64_t seed, int n, double margin);

/// Ion alone with the fast drive and a static quadrupole bias realising (a, q).
dynamics::FieldModel floquet_field(const config::RunConfig& cfg, double a, double q);

struct FloquetProbe {
  double fast_periods = 3000.0;
  int steps_per_period = 100;
  double escape_radius = 1e-3;  // m, 1000 x the 1 um start offset
};

/// Escape flag per point from direct integration.
std::vector<char> floquet_escapes(const config::RunConfig& cfg, const std::vector<FloquetPoint>& pts,
                                  const FloquetProbe& probe = {}, Execution exec = Execution::parallel);

// -- micromotion --------------------------------------------------------------

struct OffsetMicromotion {
  double q_slow = 0.0;
  double x0 = 0.0;          // mean x over the record, m
  double amplitude = 0.0;   // Omega_slow component of x, m
  double expected = 0.0;    // (q_slow / 2) x0
  dynamics::TrajectoryRecord record;
};

/// Slow drive alone, ion pushed off the null by a static radial field.
OffsetMicromotion offset_micromotion(const config::RunConfig& cfg);

struct AxialPoint {
  double endcap_bias = 0.0;  // V
  double z0 = 0.0;           // static displacement, m
  double amplitude = 0.0;    // Omega_slow component of z, m
};

/// Full dual drive with axial leakage, one run per endcap bias.
std::vector<AxialPoint> axial_micromotion(const config::RunConfig& cfg, Execution exec = Execution::parallel);

// -- equilibrium --------------------------------------------------------------

equilibrium::EquilibriumProblem equilibrium_problem(const config::RunConfig& cfg);
std::vector<Vec3> equilibrium_line(const config::RunConfig& cfg);
equilibrium::PairConfig pair_config(const config::RunConfig& cfg);

// -- modes and cooling ---------------------------------------------------------

/// Undamped per-axis oscillator of the ion and the cooling nanoparticle.
modes::CoupledOscillator cooling_axis(const config::RunConfig& cfg, Axis axis);
cooling::NoiseBudget noise_budget(const config::RunConfig& cfg);
cooling::Masses cooling_masses(const config::RunConfig& cfg);

}  // namespace dftrap::scenarios
