#pragma once

// Sympathetic-cooling steady state of the coupled pair: Doppler damping and
// recoil heating of the ion, white force noise on both particles, and the
// resulting kinetic temperatures by spectral integration or a Lyapunov solve.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "dftrap/modes.hpp"
#include "dftrap/parallel.hpp"

namespace dftrap::cooling {

struct LaserParams {
  double wavelength = 397e-9;            // m
  double linewidth = 1.0 / 7.1e-9;       // Gamma, 1/s
  double saturation = 0.5;
  double detuning = -0.5 / 7.1e-9;       // Delta, rad/s; default -Gamma/2
  double emission_factor = 0.4;          // xi, dipole pattern

  void validate() const;
  double wavenumber() const;
  /// (s/2) / (1 + s + (2 Delta / Gamma)^2), the excited-state population.
  double excitation() const;

  bool operator==(const LaserParams&) const = default;
};

/// gamma = -F0 kappa / m with F0 = hbar k Gamma rho_ee, kappa = 8 k Delta / Gamma^2 / (1 + s + (2Delta/Gamma)^2).
/// Positive for red detuning. Delta >= 0 throws unless allow_heating is set.
double doppler_rate(const LaserParams& lp, double m_ion, bool allow_heating = false);

/// (hbar k)^2 Gamma (1 + xi) / (2 m) * rho_ee, J/s.
double recoil_heating(const LaserParams& lp, double m_ion);

struct NoiseBudget {
  double heating_ion = 0.0;  // J/s
  double heating_np = 0.0;   // J/s
  double gamma_ion = 0.0;    // 1/s
  double gamma_np = 0.0;     // 1/s
  void validate() const;
};

struct Masses {
  double ion = 0.0;
  double np = 0.0;
};

struct ForcePsds {
  double ion = 0.0;  // N^2 s / rad, one-sided in angular frequency
  double np = 0.0;
};

/// White force PSDs 4 m E' / pi.
ForcePsds force_psds(const NoiseBudget& nb, const Masses& m);

/// Inverse of [[w_i^2 - j - w^2 + i w g_i, j], [mu j, w_np^2 - mu j - w^2 + i w g_np]]:
/// maps per-mass force amplitudes to displacements. Throws SingularityError on an
/// exact undamped pole.
Eigen::Matrix2cd response_functions(const modes::CoupledOscillator& c, double omega);

enum class Method { spectral, lyapunov };
const char* to_string(Method m);

struct SpectrumResult {
  std::vector<double> omega;   // rad/s
  std::vector<double> S_ion;   // m^2 s / rad
  std::vector<double> S_np;
  double T_ion = 0.0;          // K
  double T_np = 0.0;
  Method method = Method::lyapunov;
  double min_covariance_eig = 0.0;  // Lyapunov only: smallest eigenvalue of the correlation matrix
};

struct TemperatureOptions {
  std::vector<double> psd_grid;  // optional omegas at which to tabulate the PSDs
  double quad_tol = 1e-10;
  Execution exec = Execution::parallel;
};

/// Oscillator damping is taken from the noise budget. Temperatures follow
/// 1/2 m <v^2> = 1/2 kB T, with <v^2> = 1/2 int_0^inf w^2 S_qq dw in the spectral route.
SpectrumResult displacement_psd_and_temperature(modes::CoupledOscillator c, const NoiseBudget& nb,
                                                const Masses& m, Method method,
                                                const TemperatureOptions& opt = {});

/// Displacement PSDs on a grid. Order of the output matches the input grid.
void psd_on_grid(const modes::CoupledOscillator& c, const ForcePsds& f, const Masses& m,
                 const std::vector<double>& omega, std::vector<double>& s_ion, std::vector<double>& s_np,
                 Execution exec = Execution::parallel);

/// Log-spaced grid from 1e-2 to 1e2 times the pole frequencies, densified around each pole.
std::vector<double> default_psd_grid(const modes::CoupledOscillator& c, int per_decade = 40);

}  // namespace dftrap::cooling
