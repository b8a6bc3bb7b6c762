#pragma once

// Static equilibria in the pseudopotential picture: each particle sits in a
// harmonic well set by its three secular frequencies, pushed by a uniform static
// field and by the Coulomb repulsion of its partner.

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "dftrap/errors.hpp"
#include "dftrap/parallel.hpp"
#include "dftrap/trap_model.hpp"
#include "dftrap/types.hpp"

namespace dftrap::equilibrium {

inline constexpr double kLengthTolerance = 1e-9;  // m

struct EquilibriumProblem {
  ParticleSpec ion;            // omega_sec required
  Vec3 np_position = Vec3::Zero();
  int np_charge = 800;         // 0 removes the nanoparticle
  Vec3 static_field = Vec3::Zero();  // V/m, acting on the ion
  std::optional<Vec3> initial_guess;

  void validate() const;
};

struct EquilibriumSolution {
  Vec3 ion_position = Vec3::Zero();
  Vec3 residual_force = Vec3::Zero();
  bool converged = false;
  int iterations = 0;
  double min_curvature = 0.0;  // lowest eigenvalue of the well-normalised Hessian (1 = bare trap)
};

/// m * omega_max^2 * 1 nm for the given particle.
double default_force_tolerance(const ParticleSpec& p);

/// Minimum of U(r) = 1/2 m sum w_k^2 r_k^2 + k Q Q_np / |r - r_np| - Q E.r.
/// tol <= 0 selects default_force_tolerance. Throws ConvergenceError when the
/// iteration stalls or ends on a saddle (the message reports the saddle).
EquilibriumSolution solve_ion_equilibrium(const EquilibriumProblem& p, double tol = 0.0);

struct CurveOptions {
  bool warm_start = true;    // sequential continuation; false = independent cold solves
  double jump_bound = std::numeric_limits<double>::infinity();  // m, between neighbours
  double tol = 0.0;
  Execution exec = Execution::parallel;  // used only for cold solves
};

/// One solve per nanoparticle position. Failures are rethrown as BatchError with
/// the index of the offending input.
std::vector<EquilibriumSolution> ion_position_curve(const std::vector<Vec3>& np_positions,
                                                    const EquilibriumProblem& tmpl,
                                                    const CurveOptions& opt = {});

enum class PairKind { xy_pair, mixed, z_pair };
const char* to_string(PairKind k);

/// |d_z| / |d| > 0.8 is a z pair, < 0.2 an xy pair, anything between is mixed.
PairKind classify(const Vec3& separation, double* axial_fraction = nullptr);

struct SetPoint {
  std::array<double, 2> v_comp{0.0, 0.0};  // V
  double endcap_bias = 0.0;                // V on the +z endcap only
  bool operator==(const SetPoint&) const = default;
};
using VoltageSchedule = std::vector<SetPoint>;

struct PairConfig {
  TrapConfig trap;             // supplies comp_gain and endcap_field_gain
  ParticleSpec ion;            // omega_sec required
  ParticleSpec nanoparticle;   // omega_sec required
  std::optional<Vec3> ion_guess;
  std::optional<Vec3> np_guess;
};

struct JointSolution {
  SetPoint setpoint;
  Vec3 ion_position = Vec3::Zero();
  Vec3 np_position = Vec3::Zero();
  Vec3 ion_residual = Vec3::Zero();
  Vec3 np_residual = Vec3::Zero();
  bool converged = false;
  double min_curvature = 0.0;  // as in EquilibriumSolution, for the 6x6 problem
  double axial_fraction = 0.0;
  PairKind kind = PairKind::mixed;
};

/// Joint (ion + nanoparticle) equilibrium for one static field.
JointSolution solve_pair(const PairConfig& cfg, const SetPoint& sp, const std::optional<Vec3>& ion_guess,
                         const std::optional<Vec3>& np_guess);

class ScheduleError : public ConvergenceError {
 public:
  ScheduleError(std::size_t step, const std::string& what, std::vector<JointSolution> partial)
      : ConvergenceError("schedule step " + std::to_string(step) + ": " + what),
        step_(step), partial_(std::move(partial)) {}
  std::size_t step() const noexcept { return step_; }
  const std::vector<JointSolution>& partial() const noexcept { return partial_; }

 private:
  std::size_t step_;
  std::vector<JointSolution> partial_;
};

/// Walks the set-points in order, warm-starting each solve from the previous one.
std::vector<JointSolution> run_schedule(const VoltageSchedule& sched, const PairConfig& cfg);

}  // namespace dftrap::equilibrium
