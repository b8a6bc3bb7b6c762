#pragma once

// CSV emission for every subcommand. Numbers use the shortest round-trip form,
// so identical inputs give byte-identical files.

#include <string>
#include <vector>

#include "dftrap/cooling.hpp"
#include "dftrap/dynamics.hpp"
#include "dftrap/equilibrium.hpp"
#include "dftrap/mathieu.hpp"
#include "dftrap/modes.hpp"
#include "dftrap/spectrum.hpp"

namespace dftrap::csv {

/// Writes text to path, creating parent directories. Throws std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::string& text);

std::string stability_points(const mathieu::StabilityDiagram& d);        // q,a,stable,trace
std::string stability_boundary(const std::vector<double>& q, const std::vector<double>& a_low,
                               const std::vector<double>& a_high);      // q,a_low,a_high
std::string trajectory(const dynamics::TrajectoryRecord& rec);            // t,x1,y1,z1,x2,y2,z2
std::string spectrum(const spectrum::AmplitudeSpectrum& s);               // freq_hz,amplitude_m

/// np_x,np_y,np_z,ion_x,ion_y,ion_z,converged in micrometres.
std::string equilibrium_curve(const std::vector<Vec3>& np, const std::vector<equilibrium::EquilibriumSolution>& sol);

/// step,v_c1,v_c2,endcap_bias,ion_x_um,...,np_z_um,axial_fraction,kind,converged
std::string schedule(const std::vector<equilibrium::JointSolution>& sol);

struct ModeRow {
  std::string axis;
  const modes::ModePair* pair;
};
std::string modes_table(const std::vector<ModeRow>& rows);                // axis,mode,freq_hz,re_ion,re_np

std::string psd(const cooling::SpectrumResult& r);                        // omega_rad_s,S_ion,S_np

struct TemperatureRow {
  std::string axis;
  cooling::Method method;
  double t_ion, t_np;
};
std::string temperatures(const std::vector<TemperatureRow>& rows);        // axis,method,T_ion_K,T_np_K

}  // namespace dftrap::csv
