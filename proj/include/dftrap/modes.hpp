#pragma once

// Collective modes of one Coulomb-coupled ion / nanoparticle pair along one axis:
//   x_i''  = (-w_i^2 + j) x_i - j x_np - g_i x_i'
//   x_np'' = -mu j x_i + (-w_np^2 + mu j) x_np - g_np x_np'

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dftrap/trap_model.hpp"
#include "dftrap/types.hpp"

namespace dftrap::modes {

using cplx = std::complex<double>;

struct CoupledOscillator {
  double omega_ion = 0.0;   // rad/s
  double omega_np = 0.0;    // rad/s
  double gamma_ion = 0.0;   // 1/s
  double gamma_np = 0.0;    // 1/s
  double coupling_j = 0.0;  // (rad/s)^2
  double mu = 0.0;          // m_ion / m_np

  void validate() const;
  /// (s^2 + g_i s + w_i^2 - j)(s^2 + g_np s + w_np^2 - mu j) - mu j^2
  cplx characteristic(cplx s) const;
};

/// Radial coupling j = k Q_i Q_np / (d^3 m_i); the axial constant is -2 times this.
double radial_coupling(double q_ion, double q_np, double separation, double m_ion);

/// Per-axis oscillator with j_x = j_y = w_z,i^2 and j_z = -2 w_z,i^2. On-axis force
/// balance m w_z^2 d = k Q Q / d^2 (nanoparticle near the centre) is what makes
/// radial_coupling equal w_z,i^2.
CoupledOscillator axis_oscillator(Axis axis, const ParticleSpec& ion, const ParticleSpec& np,
                                  double gamma_ion, double gamma_np);

/// State vector (x_i, x_np, v_i, v_np): identity in the upper right, stiffness and
/// damping in the lower half.
Eigen::Matrix4d build_matrix(const CoupledOscillator& c);

struct Mode {
  cplx lambda;                  // eigenvalue with Im >= 0, rad/s
  std::array<cplx, 2> evec{};   // (ion, np); largest |component| = 1, ion component real >= 0
  bool ion_dominated = false;
  double residual = 0.0;        // |M v - lambda v| / (|M| |v|)
  double freq_hz() const;
};

struct ModePair {
  Mode in;
  Mode out;
  bool degenerate = false;      // |lambda_in - lambda_out| < 1e-6 |lambda|
  const Mode& ion_mode() const { return in.ion_dominated ? in : out; }
  const Mode& np_mode() const { return in.ion_dominated ? out : in; }
};

/// Dense eigen-solve of M, Newton refinement on the characteristic polynomial,
/// in/out labelling by the sign of Re(a conj b).
ModePair eigenmodes(const CoupledOscillator& c);

struct LimitEntry {
  std::string label;
  double numeric = 0.0;       // |lambda|, rad/s
  double closed_form = 0.0;   // rad/s
  double rel_dev = 0.0;
};

struct LimitReport {
  std::vector<LimitEntry> entries;
  double max_rel_dev() const;
};

/// mu -> 0 closed forms: ion-like mode sqrt(w_i^2 - j), nanoparticle-like mode w_np.
/// With j_x = w_z,i^2 and j_z = -2 w_z,i^2 these are sqrt(w_x,i^2 - w_z,i^2),
/// w_x,np, w_z,np and sqrt(3) w_z,i.
LimitReport mu_zero_limit_check(const std::vector<std::pair<std::string, CoupledOscillator>>& axes);

}  // namespace dftrap::modes
