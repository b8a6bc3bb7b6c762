#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dftrap/csv.hpp"

using namespace dftrap;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("csv headers") {
  CHECK(first_line(csv::stability_points({})) == "q,a,stable,trace");
  CHECK(first_line(csv::stability_boundary({}, {}, {})) == "q,a_low,a_high");
  CHECK(first_line(csv::trajectory({})) == "t,x1,y1,z1,x2,y2,z2");
  CHECK(first_line(csv::spectrum({})) == "freq_hz,amplitude_m");
  CHECK(first_line(csv::equilibrium_curve({}, {})) == "np_x,np_y,np_z,ion_x,ion_y,ion_z,converged");
  CHECK(first_line(csv::modes_table({})) == "axis,mode,freq_hz,re_ion,re_np");
  CHECK(first_line(csv::psd({})) == "omega_rad_s,S_ion,S_np");
  CHECK(first_line(csv::temperatures({})) == "axis,method,T_ion_K,T_np_K");
}

TEST_CASE("equilibrium curve is written in micrometres") {
  equilibrium::EquilibriumSolution s;
  s.ion_position = Vec3(0, 0, 45.9e-6);
  s.converged = true;
  const auto text = csv::equilibrium_curve({Vec3(0, 0, -3e-6)}, {s});
  CHECK(text.find("0,0,-3,0,0,45.9") != std::string::npos);
}

TEST_CASE("write_file creates directories") {
  const auto dir = std::filesystem::temp_directory_path() / "dftrap_csv_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  csv::write_file((dir / "x.csv").string(), "a,b\n1,2\n");
  std::ifstream in(dir / "x.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "a,b\n1,2\n");
  std::filesystem::remove_all(dir.parent_path());
}
