#include "dftrap/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "json.hpp"

#include "dftrap/constants.hpp"
#include "dftrap/errors.hpp"
#include "dftrap/units.hpp"

namespace dftrap::config {

using json = nlohmann::ordered_json;
using units::Dimension;

namespace {

std::string where(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

double to_si(const json& v, Dimension d, const std::string& path) {
  if (v.is_string()) {
    try {
      return units::parse(v.get<std::string>(), d);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}: {}", path, e.what()));
    }
  }
  if (v.is_number() && d == Dimension::dimensionless) return v.get<double>();
  if (v.is_number())
    throw ConfigError(fmt::format("{}: bare number given for a {} quantity; add a unit", path, units::to_string(d)));
  throw ConfigError(fmt::format("{}: expected a quantity string", path));
}

void read(const json& j, const char* key, Dimension d, double& out, const std::string& path) {
  if (j.contains(key)) out = to_si(j.at(key), d, where(path, key));
}

void read_int(const json& j, const char* key, int& out, const std::string& path) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_integer()) throw ConfigError(fmt::format("{}: expected an integer", where(path, key)));
  out = j.at(key).get<int>();
}

void read_charge(const json& j, const char* key, int& out, const std::string& path) {
  if (!j.contains(key)) return;
  const double q = to_si(j.at(key), Dimension::charge, where(path, key));
  if (q != std::round(q)) throw ConfigError(fmt::format("{}: charge must be a whole number of e", where(path, key)));
  out = static_cast<int>(std::lround(q));
}

template <std::size_t N>
void read_array(const json& j, const char* key, Dimension d, std::array<double, N>& out, const std::string& path) {
  if (!j.contains(key)) return;
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != N)
    throw ConfigError(fmt::format("{}: expected an array of {} quantities", where(path, key), N));
  for (std::size_t i = 0; i < N; ++i) out[i] = to_si(a[i], d, fmt::format("{}[{}]", where(path, key), i));
}

std::string q(double v, Dimension d) { return units::format(v, d); }

template <std::size_t N>
json qa(const std::array<double, N>& a, Dimension d) {
  json out = json::array();
  for (double v : a) out.push_back(q(v, d));
  return out;
}

void read_trap(const json& j, TrapConfig& t) {
  const std::string p = "trap";
  read(j, "r0", Dimension::length, t.r0, p);
  read(j, "kappa_geo", Dimension::dimensionless, t.kappa_geo, p);
  read(j, "omega_slow", Dimension::angular_freq, t.omega_slow, p);
  read(j, "omega_fast", Dimension::angular_freq, t.omega_fast, p);
  read(j, "v_slow", Dimension::voltage, t.v_slow, p);
  read(j, "v_fast", Dimension::voltage, t.v_fast, p);
  read(j, "v_endcap", Dimension::voltage, t.v_endcap, p);
  read_array(j, "v_comp", Dimension::voltage, t.v_comp, p);
  read(j, "comp_gain", Dimension::field_per_volt, t.comp_gain, p);
  read(j, "axial_gain", Dimension::dimensionless, t.axial_gain, p);
  read(j, "endcap_bias", Dimension::voltage, t.endcap_bias, p);
  read(j, "endcap_field_gain", Dimension::field_per_volt, t.endcap_field_gain, p);
  read(j, "v_dc_quad", Dimension::voltage, t.v_dc_quad, p);
  read(j, "slow_phase", Dimension::dimensionless, t.slow_phase, p);
}

json write_trap(const TrapConfig& t) {
  return json{{"r0", q(t.r0, Dimension::length)},
              {"kappa_geo", t.kappa_geo},
              {"omega_slow", q(t.omega_slow, Dimension::angular_freq)},
              {"omega_fast", q(t.omega_fast, Dimension::angular_freq)},
              {"v_slow", q(t.v_slow, Dimension::voltage)},
              {"v_fast", q(t.v_fast, Dimension::voltage)},
              {"v_endcap", q(t.v_endcap, Dimension::voltage)},
              {"v_comp", qa(t.v_comp, Dimension::voltage)},
              {"comp_gain", q(t.comp_gain, Dimension::field_per_volt)},
              {"axial_gain", t.axial_gain},
              {"endcap_bias", q(t.endcap_bias, Dimension::voltage)},
              {"endcap_field_gain", q(t.endcap_field_gain, Dimension::field_per_volt)},
              {"v_dc_quad", q(t.v_dc_quad, Dimension::voltage)},
              {"slow_phase", t.slow_phase}};
}

void read_particle(const json& j, ParticleSpec& p, const std::string& path) {
  read_charge(j, "charge", p.charge, path);
  read(j, "mass", Dimension::mass, p.mass, path);
  if (j.contains("omega_sec")) {
    if (j.at("omega_sec").is_null()) {
      p.omega_sec.reset();
    } else {
      std::array<double, 3> w{};
      read_array(j, "omega_sec", Dimension::angular_freq, w, path);
      p.omega_sec = w;
    }
  }
}

json write_particle(const ParticleSpec& p) {
  json j{{"charge", q(p.charge, Dimension::charge)}, {"mass", q(p.mass, Dimension::mass)}};
  j["omega_sec"] = p.omega_sec ? qa(*p.omega_sec, Dimension::angular_freq) : json(nullptr);
  return j;
}

}  // namespace

void RunConfig::validate() const {
  trap.validate();
  for (const auto& [name, p] : particles) {
    try {
      p.validate();
    } catch (const DomainError& e) {
      throw ConfigError(fmt::format("particles.{}: {}", name, e.what()));
    }
  }
  for (const std::string* r : {&roles.ion, &roles.nanoparticle, &roles.cooling_nanoparticle})
    if (!particles.contains(*r)) throw ConfigError(fmt::format("roles: particle '{}' is not defined", *r));
  laser.validate();
  if (noise.heating_np < 0.0 || noise.gamma_np < 0.0) throw ConfigError("noise: rates must be >= 0");
  if (stability.nq < 2 || stability.na < 2) throw ConfigError("stability: need at least 2 points per axis");
  if (stability.boundary_points < 1) throw ConfigError("stability: boundary_points must be >= 1");
  if (workers < 0) throw ConfigError("workers must be >= 0");
}

const ParticleSpec& RunConfig::particle(const std::string& name) const {
  const auto it = particles.find(name);
  if (it == particles.end()) throw ConfigError(fmt::format("particle '{}' is not defined", name));
  return it->second;
}

bool RunConfig::operator==(const RunConfig&) const = default;

RunConfig preset(const std::string& name) {
  if (name != "paper") throw ConfigError(fmt::format("unknown preset '{}' (available: paper)", name));
  RunConfig c;
  c.scenario = "paper";
  c.trap = presets::reference_trap();
  c.particles["ion"] = presets::calcium_ion();
  c.particles["nanoparticle"] = presets::nanoparticle();
  c.particles["nanoparticle-light"] = presets::nanoparticle_light();
  c.stability.measured = {{1250.0, 130.0}};  // 2.5 kVpp, 260 Vpp
  // radial -> axial rotation of the pair: compensation field off, endcap bias up
  c.schedule = {{{-69.0, 0.0}, 0.0}, {{-69.0, 0.0}, 20.0}, {{-60.0, 0.0}, 28.0}, {{0.0, 0.0}, 40.0}};
  return c;
}

std::vector<std::string> preset_names() { return {"paper"}; }

RunConfig from_json_text(const std::string& text, const RunConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  RunConfig c = base;
  try {
    if (j.contains("preset")) c = preset(j.at("preset").get<std::string>());
    if (j.contains("scenario")) c.scenario = j.at("scenario").get<std::string>();
    if (j.contains("trap")) read_trap(j.at("trap"), c.trap);
    if (j.contains("particles")) {
      for (const auto& [name, pj] : j.at("particles").items()) {
        ParticleSpec p = c.particles.contains(name) ? c.particles.at(name) : ParticleSpec{};
        read_particle(pj, p, "particles." + name);
        c.particles[name] = p;
      }
    }
    if (j.contains("roles")) {
      const json& r = j.at("roles");
      if (r.contains("ion")) c.roles.ion = r.at("ion").get<std::string>();
      if (r.contains("nanoparticle")) c.roles.nanoparticle = r.at("nanoparticle").get<std::string>();
      if (r.contains("cooling_nanoparticle"))
        c.roles.cooling_nanoparticle = r.at("cooling_nanoparticle").get<std::string>();
    }
    if (j.contains("laser")) {
      const json& l = j.at("laser");
      read(l, "wavelength", Dimension::length, c.laser.wavelength, "laser");
      read(l, "linewidth", Dimension::angular_freq, c.laser.linewidth, "laser");
      read(l, "saturation", Dimension::dimensionless, c.laser.saturation, "laser");
      read(l, "detuning", Dimension::angular_freq, c.laser.detuning, "laser");
      read(l, "emission_factor", Dimension::dimensionless, c.laser.emission_factor, "laser");
    }
    if (j.contains("noise")) {
      read(j.at("noise"), "heating_np", Dimension::power, c.noise.heating_np, "noise");
      read(j.at("noise"), "gamma_np", Dimension::angular_freq, c.noise.gamma_np, "noise");
    }
    if (j.contains("stability")) {
      const json& s = j.at("stability");
      const std::string p = "stability";
      read(s, "q_min", Dimension::dimensionless, c.stability.q_min, p);
      read(s, "q_max", Dimension::dimensionless, c.stability.q_max, p);
      read(s, "a_min", Dimension::dimensionless, c.stability.a_min, p);
      read(s, "a_max", Dimension::dimensionless, c.stability.a_max, p);
      read_int(s, "nq", c.stability.nq, p);
      read_int(s, "na", c.stability.na, p);
      read_int(s, "boundary_points", c.stability.boundary_points, p);
      read_int(s, "steps", c.stability.steps, p);
      if (s.contains("measured")) {
        c.stability.measured.clear();
        for (const auto& m : s.at("measured")) {
          MeasuredThreshold t;
          read(m, "v_fast", Dimension::voltage, t.v_fast, "stability.measured");
          read(m, "v_slow_max", Dimension::voltage, t.v_slow_max, "stability.measured");
          c.stability.measured.push_back(t);
        }
      }
    }
    if (j.contains("trajectory")) {
      const json& s = j.at("trajectory");
      const std::string p = "trajectory";
      read(s, "fast_periods", Dimension::dimensionless, c.trajectory.fast_periods, p);
      read_int(s, "steps_per_fast_period", c.trajectory.steps_per_fast_period, p);
      read_int(s, "sample_every", c.trajectory.sample_every, p);
      read_array(s, "ion_offset", Dimension::length, c.trajectory.ion_offset, p);
      if (s.contains("with_nanoparticle")) c.trajectory.with_nanoparticle = s.at("with_nanoparticle").get<bool>();
      read_array(s, "np_offset", Dimension::length, c.trajectory.np_offset, p);
    }
    if (j.contains("micromotion")) {
      const json& s = j.at("micromotion");
      const std::string p = "micromotion";
      MicromotionSettings& m = c.micromotion;
      read(s, "q_slow", Dimension::dimensionless, m.q_slow, p);
      read(s, "offset", Dimension::length, m.offset, p);
      read(s, "offset_periods", Dimension::dimensionless, m.offset_periods, p);
      read(s, "q", Dimension::dimensionless, m.q, p);
      read(s, "a_eff", Dimension::dimensionless, m.a_eff, p);
      read(s, "axial_rf_gain", Dimension::dimensionless, m.axial_rf_gain, p);
      if (s.contains("endcap_biases")) {
        m.endcap_biases.clear();
        for (const auto& b : s.at("endcap_biases")) m.endcap_biases.push_back(to_si(b, Dimension::voltage, p + ".endcap_biases"));
      }
      read(s, "axial_periods", Dimension::dimensionless, m.axial_periods, p);
      read_int(s, "steps_per_fast_period", m.steps_per_fast_period, p);
    }
    if (j.contains("equilibrium")) {
      const json& s = j.at("equilibrium");
      const std::string p = "equilibrium";
      EquilibriumSettings& e = c.equilibrium;
      read_array(s, "np_position", Dimension::length, e.np_position, p);
      read_charge(s, "np_charge", e.np_charge, p);
      read_array(s, "static_field", Dimension::field, e.static_field, p);
      read(s, "line_x_min", Dimension::length, e.line_x_min, p);
      read(s, "line_x_max", Dimension::length, e.line_x_max, p);
      read(s, "line_z", Dimension::length, e.line_z, p);
      read_int(s, "line_points", e.line_points, p);
    }
    if (j.contains("schedule")) {
      c.schedule.clear();
      for (const auto& sp : j.at("schedule")) {
        equilibrium::SetPoint s;
        read_array(sp, "v_comp", Dimension::voltage, s.v_comp, "schedule");
        read(sp, "endcap_bias", Dimension::voltage, s.endcap_bias, "schedule");
        c.schedule.push_back(s);
      }
    }
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    read_int(j, "workers", c.workers, "");
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config has a field of the wrong type: {}", e.what()));
  }
  c.validate();
  return c;
}

RunConfig load_file(const std::string& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), base);
}

std::string to_json_text(const RunConfig& c) {
  json j;
  j["scenario"] = c.scenario;
  j["trap"] = write_trap(c.trap);
  json parts = json::object();
  for (const auto& [name, p] : c.particles) parts[name] = write_particle(p);
  j["particles"] = parts;
  j["roles"] = {{"ion", c.roles.ion},
                {"nanoparticle", c.roles.nanoparticle},
                {"cooling_nanoparticle", c.roles.cooling_nanoparticle}};
  j["laser"] = {{"wavelength", q(c.laser.wavelength, Dimension::length)},
                {"linewidth", q(c.laser.linewidth, Dimension::angular_freq)},
                {"saturation", c.laser.saturation},
                {"detuning", q(c.laser.detuning, Dimension::angular_freq)},
                {"emission_factor", c.laser.emission_factor}};
  j["noise"] = {{"heating_np", q(c.noise.heating_np, Dimension::power)},
                {"gamma_np", q(c.noise.gamma_np, Dimension::angular_freq)}};
  json measured = json::array();
  for (const auto& m : c.stability.measured)
    measured.push_back({{"v_fast", q(m.v_fast, Dimension::voltage)}, {"v_slow_max", q(m.v_slow_max, Dimension::voltage)}});
  j["stability"] = {{"q_min", c.stability.q_min}, {"q_max", c.stability.q_max},
                    {"a_min", c.stability.a_min}, {"a_max", c.stability.a_max},
                    {"nq", c.stability.nq},       {"na", c.stability.na},
                    {"boundary_points", c.stability.boundary_points},
                    {"steps", c.stability.steps}, {"measured", measured}};
  j["trajectory"] = {{"fast_periods", c.trajectory.fast_periods},
                     {"steps_per_fast_period", c.trajectory.steps_per_fast_period},
                     {"sample_every", c.trajectory.sample_every},
                     {"ion_offset", qa(c.trajectory.ion_offset, Dimension::length)},
                     {"with_nanoparticle", c.trajectory.with_nanoparticle},
                     {"np_offset", qa(c.trajectory.np_offset, Dimension::length)}};
  json biases = json::array();
  for (double b : c.micromotion.endcap_biases) biases.push_back(q(b, Dimension::voltage));
  j["micromotion"] = {{"q_slow", c.micromotion.q_slow},
                      {"offset", q(c.micromotion.offset, Dimension::length)},
                      {"offset_periods", c.micromotion.offset_periods},
                      {"q", c.micromotion.q},
                      {"a_eff", c.micromotion.a_eff},
                      {"axial_rf_gain", c.micromotion.axial_rf_gain},
                      {"endcap_biases", biases},
                      {"axial_periods", c.micromotion.axial_periods},
                      {"steps_per_fast_period", c.micromotion.steps_per_fast_period}};
  j["equilibrium"] = {{"np_position", qa(c.equilibrium.np_position, Dimension::length)},
                      {"np_charge", q(c.equilibrium.np_charge, Dimension::charge)},
                      {"static_field", qa(c.equilibrium.static_field, Dimension::field)},
                      {"line_x_min", q(c.equilibrium.line_x_min, Dimension::length)},
                      {"line_x_max", q(c.equilibrium.line_x_max, Dimension::length)},
                      {"line_z", q(c.equilibrium.line_z, Dimension::length)},
                      {"line_points", c.equilibrium.line_points}};
  json sched = json::array();
  for (const auto& s : c.schedule)
    sched.push_back({{"v_comp", qa(s.v_comp, Dimension::voltage)}, {"endcap_bias", q(s.endcap_bias, Dimension::voltage)}});
  j["schedule"] = sched;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  return j.dump(2) + "\n";
}

}  // namespace dftrap::config
