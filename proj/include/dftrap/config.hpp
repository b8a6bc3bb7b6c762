#pragma once

// Run configuration: a JSON tree whose physical quantities are strings with
// explicit units ("2.5 kVpp", "17.5 MHz", "800 e"), parsed and unit-checked
// into SI on load.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dftrap/cooling.hpp"
#include "dftrap/equilibrium.hpp"
#include "dftrap/trap_model.hpp"

namespace dftrap::config {

struct Roles {
  std::string ion = "ion";
  std::string nanoparticle = "nanoparticle";
  std::string cooling_nanoparticle = "nanoparticle-light";
  bool operator==(const Roles&) const = default;
};

struct NoiseSettings {
  double heating_np = 2.8e-26;                 // J/s
  double gamma_np = 2.0 * 3.141592653589793 * 69e-9;  // rad/s
  bool operator==(const NoiseSettings&) const = default;
};

struct MeasuredThreshold {
  double v_fast = 0.0;      // V amplitude
  double v_slow_max = 0.0;  // V amplitude
  bool operator==(const MeasuredThreshold&) const = default;
};

struct StabilitySettings {
  double q_min = 0.0, q_max = 0.6;
  double a_min = 0.0, a_max = 0.2;
  int nq = 61, na = 41;
  int boundary_points = 200;
  int steps = 4096;
  std::vector<MeasuredThreshold> measured;
  bool operator==(const StabilitySettings&) const = default;
};

struct TrajectorySettings {
  double fast_periods = 200.0;
  int steps_per_fast_period = 200;
  int sample_every = 1;
  std::array<double, 3> ion_offset{1e-6, 0.0, 0.0};  // m
  bool with_nanoparticle = false;
  std::array<double, 3> np_offset{0.0, 0.0, -55e-6};
  bool operator==(const TrajectorySettings&) const = default;
};

struct MicromotionSettings {
  // slow drive alone, ion pushed off the null by a static radial field
  double q_slow = 0.2;
  double offset = 5e-6;        // m
  double offset_periods = 40;  // slow periods
  // full dual drive with axial leakage, ion moved along z by the endcap bias
  double q = 0.4;
  double a_eff = 0.06;
  double axial_rf_gain = 0.02;
  std::vector<double> endcap_biases{-4.0, -8.0, -12.0, -16.0};  // V
  double axial_periods = 12;   // slow periods
  int steps_per_fast_period = 60;
  bool operator==(const MicromotionSettings&) const = default;
};

struct EquilibriumSettings {
  std::array<double, 3> np_position{0.0, 0.0, -3e-6};  // m
  int np_charge = 800;
  std::array<double, 3> static_field{0.0, 0.0, 0.0};   // V/m
  double line_x_min = -65e-6, line_x_max = 65e-6, line_z = -3e-6;
  int line_points = 27;
  bool operator==(const EquilibriumSettings&) const = default;
};

struct RunConfig {
  std::string scenario = "paper";
  TrapConfig trap;
  std::map<std::string, ParticleSpec> particles;
  Roles roles;
  cooling::LaserParams laser;
  NoiseSettings noise;
  StabilitySettings stability;
  TrajectorySettings trajectory;
  MicromotionSettings micromotion;
  EquilibriumSettings equilibrium;
  equilibrium::VoltageSchedule schedule;
  std::string output_dir = "out";
  std::uint64_t seed = 20240521;
  int workers = 0;

  void validate() const;
  const ParticleSpec& particle(const std::string& name) const;
  const ParticleSpec& ion() const { return particle(roles.ion); }
  const ParticleSpec& nanoparticle() const { return particle(roles.nanoparticle); }
  const ParticleSpec& cooling_nanoparticle() const { return particle(roles.cooling_nanoparticle); }

  bool operator==(const RunConfig& o) const;
};

/// Named presets; "paper" is the reference parameter set.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Fields missing from the file keep the values of `base`.
RunConfig from_json_text(const std::string& text, const RunConfig& base = preset("paper"));
RunConfig load_file(const std::string& path, const RunConfig& base = preset("paper"));
std::string to_json_text(const RunConfig& cfg);

}  // namespace dftrap::config
