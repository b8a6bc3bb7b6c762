#include "dftrap/csv.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace dftrap::csv {

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string stability_points(const mathieu::StabilityDiagram& d) {
  std::string s = "q,a,stable,trace\n";
  for (const auto& p : d.points) fmt::format_to(std::back_inserter(s), "{},{},{},{}\n", p.q, p.a, p.stable ? 1 : 0, p.trace);
  return s;
}

std::string stability_boundary(const std::vector<double>& q, const std::vector<double>& a_low,
                               const std::vector<double>& a_high) {
  if (a_low.size() != q.size() || a_high.size() != q.size()) throw std::invalid_argument("csv: boundary length mismatch");
  std::string s = "q,a_low,a_high\n";
  for (std::size_t i = 0; i < q.size(); ++i) fmt::format_to(std::back_inserter(s), "{},{},{}\n", q[i], a_low[i], a_high[i]);
  return s;
}

std::string trajectory(const dynamics::TrajectoryRecord& rec) {
  std::string s = "t,x1,y1,z1,x2,y2,z2\n";
  const bool two = rec.particle_count > 1;
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    const auto& st = rec.samples[i];
    fmt::format_to(std::back_inserter(s), "{},{},{},{}", rec.times[i], st.r[0].x(), st.r[0].y(), st.r[0].z());
    if (two)
      fmt::format_to(std::back_inserter(s), ",{},{},{}\n", st.r[1].x(), st.r[1].y(), st.r[1].z());
    else
      s += ",,,\n";
  }
  return s;
}

std::string spectrum(const spectrum::AmplitudeSpectrum& sp) {
  std::string s = "freq_hz,amplitude_m\n";
  for (std::size_t i = 0; i < sp.freq_hz.size(); ++i)
    fmt::format_to(std::back_inserter(s), "{},{}\n", sp.freq_hz[i], sp.amplitude[i]);
  return s;
}

std::string equilibrium_curve(const std::vector<Vec3>& np, const std::vector<equilibrium::EquilibriumSolution>& sol) {
  if (np.size() != sol.size()) throw std::invalid_argument("csv: curve length mismatch");
  std::string s = "np_x,np_y,np_z,ion_x,ion_y,ion_z,converged\n";
  for (std::size_t i = 0; i < np.size(); ++i) {
    const Vec3 a = np[i] * 1e6, b = sol[i].ion_position * 1e6;
    fmt::format_to(std::back_inserter(s), "{},{},{},{},{},{},{}\n", a.x(), a.y(), a.z(), b.x(), b.y(), b.z(),
                   sol[i].converged ? 1 : 0);
  }
  return s;
}

std::string schedule(const std::vector<equilibrium::JointSolution>& sol) {
  std::string s =
      "step,v_c1,v_c2,endcap_bias,ion_x_um,ion_y_um,ion_z_um,np_x_um,np_y_um,np_z_um,axial_fraction,kind,converged\n";
  for (std::size_t i = 0; i < sol.size(); ++i) {
    const auto& j = sol[i];
    const Vec3 a = j.ion_position * 1e6, b = j.np_position * 1e6;
    fmt::format_to(std::back_inserter(s), "{},{},{},{},{},{},{},{},{},{},{},{},{}\n", i, j.setpoint.v_comp[0],
                   j.setpoint.v_comp[1], j.setpoint.endcap_bias, a.x(), a.y(), a.z(), b.x(), b.y(), b.z(),
                   j.axial_fraction, equilibrium::to_string(j.kind), j.converged ? 1 : 0);
  }
  return s;
}

std::string modes_table(const std::vector<ModeRow>& rows) {
  std::string s = "axis,mode,freq_hz,re_ion,re_np\n";
  for (const auto& r : rows)
    for (const auto& [name, m] : {std::pair{"in", &r.pair->in}, std::pair{"out", &r.pair->out}})
      fmt::format_to(std::back_inserter(s), "{},{},{},{},{}\n", r.axis, name, m->freq_hz(), m->evec[0].real(),
                     m->evec[1].real());
  return s;
}

std::string psd(const cooling::SpectrumResult& r) {
  std::string s = "omega_rad_s,S_ion,S_np\n";
  for (std::size_t i = 0; i < r.omega.size(); ++i)
    fmt::format_to(std::back_inserter(s), "{},{},{}\n", r.omega[i], r.S_ion[i], r.S_np[i]);
  return s;
}

std::string temperatures(const std::vector<TemperatureRow>& rows) {
  std::string s = "axis,method,T_ion_K,T_np_K\n";
  for (const auto& r : rows)
    fmt::format_to(std::back_inserter(s), "{},{},{},{}\n", r.axis, cooling::to_string(r.method), r.t_ion, r.t_np);
  return s;
}

}  // namespace dftrap::csv
