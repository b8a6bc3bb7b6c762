// dftrap: command-line front end. Every subcommand loads a preset and/or a JSON
// config, runs one module, writes CSV into the output directory and finishes
// with manifest.json describing inputs, versions, outputs and timings.
//
// Exit codes: 0 success, 1 acceptance failures, 2 configuration/usage errors,
// 3 numerical failures (non-convergence, bracketing, singular geometry).

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "dftrap/acceptance.hpp"
#include "dftrap/build_info.hpp"
#include "dftrap/config.hpp"
#include "dftrap/constants.hpp"
#include "dftrap/csv.hpp"
#include "dftrap/dynamics.hpp"
#include "dftrap/equilibrium.hpp"
#include "dftrap/errors.hpp"
#include "dftrap/mathieu.hpp"
#include "dftrap/modes.hpp"
#include "dftrap/parallel.hpp"
#include "dftrap/scenarios.hpp"
#include "dftrap/spectrum.hpp"

namespace {

using namespace dftrap;
using json = nlohmann::ordered_json;

constexpr const char* kOutEnv = "DFTRAP_OUT";

struct Globals {
  std::string preset = "paper";
  std::string config_path;
  std::string out;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
};

// Where a subcommand records what it wrote.
class Run {
 public:
  Run(config::RunConfig cfg, std::filesystem::path dir) : cfg_(std::move(cfg)), dir_(std::move(dir)) {}

  const config::RunConfig& cfg() const { return cfg_; }
  config::RunConfig& cfg() { return cfg_; }

  void write(const std::string& name, const std::string& text) {
    csv::write_file((dir_ / name).string(), text);
    outputs_.push_back({{"file", name}, {"bytes", text.size()}, {"fnv1a64", fnv1a(text)}});
  }
  void note(const std::string& key, json value) { summary_[key] = std::move(value); }
  void time(const std::string& key, double seconds) { timings_[key] = seconds; }

  json outputs() const { return outputs_; }
  json summary() const { return summary_; }
  json timings() const { return timings_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  static std::string fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ull;
    return fmt::format("{:016x}", h);
  }

  config::RunConfig cfg_;
  std::filesystem::path dir_;
  json outputs_ = json::array();
  json summary_ = json::object();
  json timings_ = json::object();
};

template <class F>
auto timed(Run& run, const std::string& key, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  auto result = f();
  run.time(key, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return result;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

// -- subcommands --------------------------------------------------------------

struct ScanArgs {
  std::optional<double> q_min, q_max, a_min, a_max;
  std::optional<int> nq, na, boundary_points, steps;
};

int cmd_stability_scan(Run& run, const ScanArgs& a) {
  auto& s = run.cfg().stability;
  if (a.q_min) s.q_min = *a.q_min;
  if (a.q_max) s.q_max = *a.q_max;
  if (a.a_min) s.a_min = *a.a_min;
  if (a.a_max) s.a_max = *a.a_max;
  if (a.nq) s.nq = *a.nq;
  if (a.na) s.na = *a.na;
  if (a.boundary_points) s.boundary_points = *a.boundary_points;
  if (a.steps) s.steps = *a.steps;
  run.cfg().validate();

  mathieu::ScanOptions opt;
  opt.steps = s.steps;
  const auto d = timed(run, "scan_s", [&] {
    return mathieu::stability_scan({s.q_min, s.q_max}, {s.a_min, s.a_max}, s.nq, s.na, opt);
  });
  run.write("stability_points.csv", csv::stability_points(d));
  run.write("stability_grid_boundary.csv", csv::stability_boundary(d.q_grid, d.a_boundary_low, d.a_boundary_high));

  const auto qs = linspace(s.q_min, s.q_max, s.boundary_points);
  const auto lo = timed(run, "boundary_low_s", [&] { return mathieu::boundary_trace(qs, mathieu::Side::lower, opt); });
  const auto hi = timed(run, "boundary_high_s", [&] { return mathieu::boundary_trace(qs, mathieu::Side::upper, opt); });
  run.write("stability_boundary.csv", csv::stability_boundary(qs, lo, hi));

  // measured co-trapping thresholds placed on the same (q, a) chart
  std::string th = "v_fast_V,v_slow_max_V,q,a_eff,a_edge_low\n";
  for (const auto& m : s.measured) {
    TrapConfig t = run.cfg().trap;
    t.v_fast = m.v_fast;
    t.v_slow = m.v_slow_max;
    const double q = q_param(t, run.cfg().ion(), Drive::fast);
    const double edge = q < 0.908 ? mathieu::boundary_a_for_q(q, mathieu::Side::lower, 1e-7, s.steps) : 0.0;
    th += fmt::format("{},{},{},{},{}\n", m.v_fast, m.v_slow_max, q, a_eff_param(t, run.cfg().ion()), edge);
  }
  run.write("thresholds.csv", th);
  std::size_t stable = 0;
  for (const auto& p : d.points) stable += p.stable;
  run.note("grid_points", d.points.size());
  run.note("stable_points", stable);
  fmt::print("stability scan: {} x {} grid, {} stable; boundary traced at {} q values\n", s.nq, s.na, stable,
             qs.size());
  return 0;
}

struct TrajectoryArgs {
  std::optional<double> periods;
  std::optional<int> steps_per_period, sample_every;
  bool with_np = false;
};

int cmd_trajectory(Run& run, const TrajectoryArgs& a) {
  auto& t = run.cfg().trajectory;
  if (a.periods) t.fast_periods = *a.periods;
  if (a.steps_per_period) t.steps_per_fast_period = *a.steps_per_period;
  if (a.sample_every) t.sample_every = *a.sample_every;
  if (a.with_np) t.with_nanoparticle = true;
  run.cfg().validate();
  const auto& cfg = run.cfg();

  dynamics::FieldModel f;
  f.trap = cfg.trap;
  f.particles = {scenarios::without_secular(cfg.ion())};
  dynamics::TwoParticleState s;
  s.r[0] = Vec3(t.ion_offset.data());
  if (t.with_nanoparticle) {
    f.particles.push_back(scenarios::without_secular(cfg.nanoparticle()));
    s.r[1] = Vec3(t.np_offset.data());
  }
  const double period = constants::two_pi / f.trap.omega_fast;
  const auto rec = timed(run, "integrate_s", [&] {
    return dynamics::integrate(s, f, period / t.steps_per_fast_period, t.fast_periods * period, t.sample_every);
  });
  run.write("trajectory.csv", csv::trajectory(rec));
  const auto sp = spectrum::trajectory_spectrum(rec, Axis::x);
  run.write("spectrum.csv", csv::spectrum(sp));
  const double f_peak = spectrum::dominant_frequency(sp);
  const auto sec = secular_frequency(f.trap, f.particles[0], Drive::fast);
  run.note("escaped", rec.escaped);
  run.note("dominant_x_hz", f_peak);
  run.note("pseudopotential_hz", sec.omega / constants::two_pi);
  fmt::print("trajectory: {} samples, escaped = {}, dominant x line {:.6g} Hz (fast-drive pseudopotential {:.6g} Hz)\n",
             rec.samples.size(), rec.escaped, f_peak, sec.omega / constants::two_pi);
  return 0;
}

int cmd_micromotion(Run& run) {
  run.cfg().validate();
  const auto off = timed(run, "offset_s", [&] { return scenarios::offset_micromotion(run.cfg()); });
  run.write("micromotion_offset.csv", fmt::format("q_slow,x0_m,amplitude_m,expected_m\n{},{},{},{}\n", off.q_slow,
                                                  off.x0, off.amplitude, off.expected));
  const auto ax = timed(run, "axial_s", [&] { return scenarios::axial_micromotion(run.cfg()); });
  std::string t = "endcap_bias_V,z0_m,amplitude_m\n";
  for (const auto& p : ax) t += fmt::format("{},{},{}\n", p.endcap_bias, p.z0, p.amplitude);
  run.write("micromotion_axial.csv", t);
  fmt::print("micromotion: offset {:.4g} m -> amplitude {:.4g} m (q/2 x0 = {:.4g} m)\n", off.x0, off.amplitude,
             off.expected);
  for (const auto& p : ax)
    fmt::print("  endcap bias {:+g} V: z0 = {:.3g} m, slow amplitude {:.3g} m\n", p.endcap_bias, p.z0, p.amplitude);
  return 0;
}

struct EquilibriumArgs {
  std::optional<double> np_x, np_y, np_z;  // um
};

int cmd_equilibrium(Run& run, const EquilibriumArgs& a) {
  auto& e = run.cfg().equilibrium;
  if (a.np_x) e.np_position[0] = *a.np_x * 1e-6;
  if (a.np_y) e.np_position[1] = *a.np_y * 1e-6;
  if (a.np_z) e.np_position[2] = *a.np_z * 1e-6;
  run.cfg().validate();
  const auto p = scenarios::equilibrium_problem(run.cfg());
  const auto s = timed(run, "solve_s", [&] { return equilibrium::solve_ion_equilibrium(p); });
  run.write("equilibrium.csv", csv::equilibrium_curve({p.np_position}, {s}));
  run.note("min_curvature", s.min_curvature);
  run.note("iterations", s.iterations);
  fmt::print("equilibrium: nanoparticle at [{:.3f}, {:.3f}, {:.3f}] um -> ion at [{:.3f}, {:.3f}, {:.3f}] um\n",
             1e6 * p.np_position.x(), 1e6 * p.np_position.y(), 1e6 * p.np_position.z(), 1e6 * s.ion_position.x(),
             1e6 * s.ion_position.y(), 1e6 * s.ion_position.z());
  return 0;
}

struct CurveArgs {
  std::optional<double> x_min, x_max, z;  // um
  std::optional<int> points;
  bool cold = false;
};

int cmd_equilibrium_curve(Run& run, const CurveArgs& a) {
  auto& e = run.cfg().equilibrium;
  if (a.x_min) e.line_x_min = *a.x_min * 1e-6;
  if (a.x_max) e.line_x_max = *a.x_max * 1e-6;
  if (a.z) e.line_z = *a.z * 1e-6;
  if (a.points) e.line_points = *a.points;
  run.cfg().validate();
  const auto line = scenarios::equilibrium_line(run.cfg());
  equilibrium::CurveOptions opt;
  opt.warm_start = !a.cold;
  const auto sol = timed(run, "solve_s", [&] {
    return equilibrium::ion_position_curve(line, scenarios::equilibrium_problem(run.cfg()), opt);
  });
  run.write("equilibrium_curve.csv", csv::equilibrium_curve(line, sol));
  fmt::print("equilibrium curve: {} points along x in [{:.1f}, {:.1f}] um at z = {:.1f} um\n", line.size(),
             1e6 * e.line_x_min, 1e6 * e.line_x_max, 1e6 * e.line_z);
  return 0;
}

int cmd_schedule(Run& run) {
  run.cfg().validate();
  std::vector<equilibrium::JointSolution> sol;
  try {
    sol = timed(run, "solve_s", [&] { return equilibrium::run_schedule(run.cfg().schedule, scenarios::pair_config(run.cfg())); });
  } catch (const equilibrium::ScheduleError& e) {
    run.write("schedule.csv", csv::schedule(e.partial()));
    throw;
  }
  run.write("schedule.csv", csv::schedule(sol));
  for (std::size_t i = 0; i < sol.size(); ++i)
    fmt::print("step {}: comp ({:+g}, {:+g}) V, endcap bias {:+g} V -> {} (|dz|/|d| = {:.2f})\n", i,
               sol[i].setpoint.v_comp[0], sol[i].setpoint.v_comp[1], sol[i].setpoint.endcap_bias,
               equilibrium::to_string(sol[i].kind), sol[i].axial_fraction);
  return 0;
}

int cmd_modes(Run& run) {
  run.cfg().validate();
  std::vector<std::pair<std::string, modes::CoupledOscillator>> axes;
  std::vector<modes::ModePair> pairs;
  for (Axis ax : {Axis::x, Axis::y, Axis::z}) {
    axes.emplace_back(to_string(ax), scenarios::cooling_axis(run.cfg(), ax));
    pairs.push_back(modes::eigenmodes(axes.back().second));
  }
  std::vector<csv::ModeRow> rows;
  for (std::size_t i = 0; i < axes.size(); ++i) rows.push_back({axes[i].first, &pairs[i]});
  run.write("modes.csv", csv::modes_table(rows));
  const auto rep = modes::mu_zero_limit_check(axes);
  std::string lim = "label,numeric_rad_s,closed_form_rad_s,rel_dev\n";
  for (const auto& e : rep.entries)
    lim += fmt::format("{},{},{},{}\n", e.label, e.numeric, e.closed_form, e.rel_dev);
  run.write("modes_limit.csv", lim);
  fmt::print("{:<5}{:<5}{:>14}{:>12}{:>12}\n", "axis", "mode", "freq (Hz)", "ion", "np");
  for (std::size_t i = 0; i < axes.size(); ++i)
    for (const auto& [name, m] : {std::pair{"in", &pairs[i].in}, std::pair{"out", &pairs[i].out}})
      fmt::print("{:<5}{:<5}{:>14.6g}{:>12.4g}{:>12.4g}\n", axes[i].first, name, m->freq_hz(), m->evec[0].real(),
                 m->evec[1].real());
  return 0;
}

struct CoolingArgs {
  std::string method = "both";
  int per_decade = 40;
};

int cmd_cooling(Run& run, const CoolingArgs& a) {
  run.cfg().validate();
  const auto& cfg = run.cfg();
  std::vector<cooling::Method> methods;
  if (a.method == "spectral" || a.method == "both") methods.push_back(cooling::Method::spectral);
  if (a.method == "lyapunov" || a.method == "both") methods.push_back(cooling::Method::lyapunov);
  const auto nb = scenarios::noise_budget(cfg);
  const auto masses = scenarios::cooling_masses(cfg);
  std::vector<csv::TemperatureRow> rows;
  auto axis_run = [&](const std::string& label, const modes::CoupledOscillator& osc, bool psd) {
    for (std::size_t k = 0; k < methods.size(); ++k) {
      cooling::TemperatureOptions opt;
      if (psd && k == 0) opt.psd_grid = cooling::default_psd_grid(osc, a.per_decade);
      const auto r = timed(run, label + "_" + cooling::to_string(methods[k]) + "_s", [&] {
        return cooling::displacement_psd_and_temperature(osc, nb, masses, methods[k], opt);
      });
      if (!opt.psd_grid.empty()) run.write("psd_" + label + ".csv", csv::psd(r));
      rows.push_back({label, methods[k], r.T_ion, r.T_np});
    }
  };
  for (Axis ax : {Axis::x, Axis::y, Axis::z}) axis_run(to_string(ax), scenarios::cooling_axis(cfg, ax), true);
  auto free = scenarios::cooling_axis(cfg, Axis::x);
  free.coupling_j = 0.0;
  axis_run("uncoupled", free, false);
  run.write("temperatures.csv", csv::temperatures(rows));
  run.note("gamma_doppler_rad_s", nb.gamma_ion);
  run.note("heating_ion_J_s", nb.heating_ion);
  fmt::print("Doppler damping 2pi x {:.4g} kHz, ion recoil heating {:.4g} J/s\n", nb.gamma_ion / constants::two_pi / 1e3,
             nb.heating_ion);
  for (const auto& r : rows)
    fmt::print("  {:<10}{:<9} T_ion = {:.4g} K, T_np = {:.4g} K\n", r.axis, cooling::to_string(r.method), r.t_ion,
               r.t_np);
  return 0;
}

int cmd_reproduce_all(Run& run, const std::vector<int>& only) {
  run.cfg().validate();
  std::string text, table = "id,name,passed,seconds,detail\n";
  int failed = 0;
  const auto results = acceptance::run(run.cfg(), only, [&](const acceptance::CriterionResult& r) {
    fmt::print("{}\n", acceptance::format_line(r));
    std::cout.flush();
  });
  for (const auto& r : results) {
    failed += !r.passed;
    text += acceptance::format_line(r) + "\n";
    std::string detail = r.detail;
    for (char& ch : detail)
      if (ch == '"') ch = '\'';
    table += fmt::format("{},{},{},{:.3f},\"{}\"\n", r.id, r.name, r.passed ? 1 : 0, r.seconds, detail);
    run.time(fmt::format("criterion_{}_s", r.id), r.seconds);
  }
  run.write("acceptance_report.txt", text);
  run.write("acceptance_report.csv", table);
  run.note("criteria", results.size());
  run.note("failed", failed);
  fmt::print("{} of {} criteria passed\n", results.size() - failed, results.size());
  return failed == 0 ? 0 : 1;
}

// -- driver ---------------------------------------------------------------------

json manifest(const std::string& sub, const std::vector<std::string>& argv, const Globals& g, const Run* run,
              int code, const std::string& error, double seconds) {
  json versions = json::object();
  for (const auto& [k, v] : build_info()) versions[k] = v;
  json m;
  m["schema"] = "dftrap-manifest/1";
  m["subcommand"] = sub;
  m["argv"] = argv;
  m["preset"] = g.preset;
  m["config_file"] = g.config_path.empty() ? json(nullptr) : json(g.config_path);
  m["versions"] = versions;
  m["workers"] = worker_count();
  if (run) {
    m["seed"] = run->cfg().seed;
    m["output_dir"] = run->dir().string();
    m["inputs"] = json::parse(config::to_json_text(run->cfg()));
    m["outputs"] = run->outputs();
    m["summary"] = run->summary();
    m["timings_s"] = run->timings();
  }
  m["total_s"] = seconds;
  m["exit_code"] = code;
  m["status"] = code == 0 ? "ok" : (code == 1 ? "acceptance-failed" : "error");
  if (!error.empty()) m["error"] = error;
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-frequency Paul trap: stability, dynamics, equilibria, modes and cooling"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--preset", g.preset, "Named parameter preset")->capture_default_str();
  app.add_option("--config", g.config_path, "JSON config; missing fields keep the preset values")
      ->check(CLI::ExistingFile);
  app.add_option("--out", g.out, std::string("Output directory (default: $") + kOutEnv + " or the config value)");
  app.add_option("--workers", g.workers, "OpenMP worker count, 0 = runtime default")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "Seed for randomized checks");

  ScanArgs scan;
  auto* s_scan = app.add_subcommand("stability-scan", "Mathieu stability grid, first-region boundary, thresholds");
  s_scan->add_option("--q-min", scan.q_min);
  s_scan->add_option("--q-max", scan.q_max);
  s_scan->add_option("--a-min", scan.a_min);
  s_scan->add_option("--a-max", scan.a_max);
  s_scan->add_option("--nq", scan.nq);
  s_scan->add_option("--na", scan.na);
  s_scan->add_option("--boundary-points", scan.boundary_points);
  s_scan->add_option("--steps", scan.steps, "RK4 steps per period");

  TrajectoryArgs traj;
  auto* s_traj = app.add_subcommand("trajectory", "Integrate the ion (optionally with the nanoparticle)");
  s_traj->add_option("--periods", traj.periods, "Length in fast-drive periods");
  s_traj->add_option("--steps-per-period", traj.steps_per_period);
  s_traj->add_option("--sample-every", traj.sample_every);
  s_traj->add_flag("--with-nanoparticle", traj.with_np);

  app.add_subcommand("micromotion", "Slow micromotion: static offset and axial leakage runs");

  EquilibriumArgs eq;
  auto* s_eq = app.add_subcommand("equilibrium", "Ion equilibrium for one nanoparticle position");
  s_eq->add_option("--np-x", eq.np_x, "um");
  s_eq->add_option("--np-y", eq.np_y, "um");
  s_eq->add_option("--np-z", eq.np_z, "um");

  CurveArgs curve;
  auto* s_curve = app.add_subcommand("equilibrium-curve", "Ion position while the nanoparticle moves along x");
  s_curve->add_option("--x-min", curve.x_min, "um");
  s_curve->add_option("--x-max", curve.x_max, "um");
  s_curve->add_option("--z", curve.z, "um");
  s_curve->add_option("--points", curve.points);
  s_curve->add_flag("--cold", curve.cold, "Independent cold starts instead of continuation");

  app.add_subcommand("schedule", "Joint equilibria along the voltage schedule");
  app.add_subcommand("modes", "Coupled-mode eigenfrequencies and eigenvectors per axis");

  CoolingArgs cool;
  auto* s_cool = app.add_subcommand("cooling", "Sympathetic-cooling temperatures and displacement spectra");
  s_cool->add_option("--method", cool.method)->check(CLI::IsMember({"spectral", "lyapunov", "both"}));
  s_cool->add_option("--per-decade", cool.per_decade, "PSD grid density")->check(CLI::PositiveNumber);

  std::vector<int> only;
  auto* s_all = app.add_subcommand("reproduce-all", "Run the acceptance suite and write a pass/fail report");
  s_all->add_option("--only", only, "Criterion ids to run")->check(CLI::Range(1, acceptance::kCriterionCount));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  const std::vector<std::string> args(argv, argv + argc);
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<Run> run;
  int code = 0;
  std::string error;
  try {
    config::RunConfig cfg = g.config_path.empty() ? config::preset(g.preset)
                                                  : config::load_file(g.config_path, config::preset(g.preset));
    if (g.workers) cfg.workers = *g.workers;
    if (g.seed) cfg.seed = *g.seed;
    std::string out = cfg.output_dir;
    if (const char* env = std::getenv(kOutEnv); env && *env) out = env;
    if (!g.out.empty()) out = g.out;
    cfg.output_dir = out;
    cfg.validate();
    set_worker_count(cfg.workers);
    std::filesystem::create_directories(out);
    run.emplace(cfg, std::filesystem::path(out));

    const std::map<std::string, std::function<int()>> table{
        {"stability-scan", [&] { return cmd_stability_scan(*run, scan); }},
        {"trajectory", [&] { return cmd_trajectory(*run, traj); }},
        {"micromotion", [&] { return cmd_micromotion(*run); }},
        {"equilibrium", [&] { return cmd_equilibrium(*run, eq); }},
        {"equilibrium-curve", [&] { return cmd_equilibrium_curve(*run, curve); }},
        {"schedule", [&] { return cmd_schedule(*run); }},
        {"modes", [&] { return cmd_modes(*run); }},
        {"cooling", [&] { return cmd_cooling(*run, cool); }},
        {"reproduce-all", [&] { return cmd_reproduce_all(*run, only); }},
    };
    code = table.at(sub)();
  } catch (const ConvergenceError& e) {
    code = 3, error = e.what();
  } catch (const BracketError& e) {
    code = 3, error = e.what();
  } catch (const SingularityError& e) {
    code = 3, error = e.what();
  } catch (const BatchError& e) {
    code = 3, error = e.what();
  } catch (const std::exception& e) {
    // bad units, bad ranges, unwritable output directory
    code = 2, error = e.what();
  }
  if (!error.empty()) fmt::print(stderr, "dftrap {}: {}\n", sub, error);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (run) {
    try {
      csv::write_file((run->dir() / "manifest.json").string(),
                      manifest(sub, args, g, &*run, code, error, secs).dump(2) + "\n");
    } catch (const std::exception& e) {
      fmt::print(stderr, "dftrap: cannot write manifest: {}\n", e.what());
      if (code == 0) code = 2;
    }
  }
  return code;
}
