#include <cmath>

#include "doctest.h"
#include "dftrap/config.hpp"
#include "dftrap/equilibrium.hpp"
#include "dftrap/scenarios.hpp"
#include "oracles.hpp"

using namespace dftrap;
using namespace dftrap::equilibrium;

namespace {

EquilibriumProblem case3() {
  EquilibriumProblem p;
  p.ion = presets::calcium_ion();
  p.np_position = Vec3(0, 0, -3e-6);
  return p;
}

double cubic_constant(const EquilibriumProblem& p) {
  const double wz = (*p.ion.omega_sec)[2];
  return oracle::kCoulomb * p.np_charge * oracle::kE * oracle::kE / (p.ion.mass * wz * wz);
}

}  // namespace

TEST_CASE("oracle: on-axis cubic constant") {
  CHECK(cubic_constant(case3()) * 1e18 == doctest::Approx(1.10e5).epsilon(0.01));
}

TEST_CASE("case III: ion on axis at 45.9 um") {
  const auto p = case3();
  const auto s = solve_ion_equilibrium(p);
  CHECK(s.converged);
  CHECK(std::abs(s.ion_position.x()) < 1e-9);
  CHECK(std::abs(s.ion_position.y()) < 1e-9);
  const double z = s.ion_position.z();
  CHECK(std::abs(z - 45.9e-6) < 1e-6);
  const double d = 3e-6;
  CHECK(std::abs(z * (z + d) * (z + d) - cubic_constant(p)) / cubic_constant(p) < 1e-6);
  CHECK(s.min_curvature > 0.0);
  CHECK(s.residual_force.norm() < default_force_tolerance(p.ion));
}

TEST_CASE("nanoparticle far out in the radial plane leaves the ion near the origin") {
  for (double x : {-50e-6, 50e-6}) {
    auto p = case3();
    p.np_position = Vec3(x, 0, 0);
    CHECK(solve_ion_equilibrium(p).ion_position.norm() < 2e-6);
  }
}

TEST_CASE("no nanoparticle and no field: exactly the origin") {
  auto p = case3();
  p.np_charge = 0;
  CHECK(solve_ion_equilibrium(p).ion_position == Vec3::Zero());
}

TEST_CASE("charge scaling of the on-axis cubic") {
  const auto base = case3();
  for (double f : {0.5, 2.0}) {
    auto p = base;
    p.np_charge = static_cast<int>(base.np_charge * f);
    const double z = solve_ion_equilibrium(p).ion_position.z();
    CHECK(z * (z + 3e-6) * (z + 3e-6) == doctest::Approx(f * cubic_constant(base)).epsilon(1e-6));
  }
}

TEST_CASE("large separation: pure harmonic response to the static field") {
  auto p = case3();
  p.np_position = Vec3(0.5, 0.3, 0.4);
  p.static_field = Vec3(30.0, -20.0, 5.0);
  const auto s = solve_ion_equilibrium(p);
  const auto& w = *p.ion.omega_sec;
  for (int k = 0; k < 3; ++k) {
    const double hand = p.ion.charge_coulomb() * p.static_field[k] / (p.ion.mass * w[k] * w[k]);
    CHECK(s.ion_position[k] == doctest::Approx(hand).epsilon(1e-6));
  }
}

TEST_CASE("like charges only") {
  auto p = case3();
  p.np_charge = -800;
  CHECK_THROWS_AS(solve_ion_equilibrium(p), DomainError);
}

TEST_CASE("line scan at z = -3 um") {
  const auto cfg = config::preset("paper");
  const auto line = scenarios::equilibrium_line(cfg);
  const auto sol = ion_position_curve(line, scenarios::equilibrium_problem(cfg));
  std::size_t peak = 0;
  for (std::size_t i = 0; i < sol.size(); ++i) {
    CHECK(sol[i].converged);
    CHECK(sol[i].min_curvature > 0.0);
    if (sol[i].ion_position.z() > sol[peak].ion_position.z()) peak = i;
  }
  CHECK(std::abs(line[peak].x()) < 10e-6);
  // decays monotonically away from the peak
  for (std::size_t i = peak + 1; i < sol.size(); ++i) CHECK(sol[i].ion_position.z() < sol[i - 1].ion_position.z());
  for (std::size_t i = peak; i > 0; --i) CHECK(sol[i - 1].ion_position.z() < sol[i].ion_position.z());
}

TEST_SUITE("literal_examples") {
  // An independent minimisation gives z = 8.76 um at |x| = 50 um for these inputs.
  TEST_CASE("line scan: ion z below 2 um once the nanoparticle is 50 um off axis") {
    const auto cfg = config::preset("paper");
    const auto line = scenarios::equilibrium_line(cfg);
    const auto sol = ion_position_curve(line, scenarios::equilibrium_problem(cfg));
    for (std::size_t i = 0; i < sol.size(); ++i)
      if (std::abs(line[i].x()) >= 50e-6 - 1e-12) {
        CAPTURE(line[i].x());
        CHECK(std::abs(sol[i].ion_position.z()) < 2e-6);
      }
  }
}

TEST_CASE("mirror symmetry in x") {
  auto p = case3();
  std::vector<Vec3> plus, minus;
  for (double x : {5e-6, 20e-6, 40e-6}) {
    plus.emplace_back(x, 0, -3e-6);
    minus.emplace_back(-x, 0, -3e-6);
  }
  CurveOptions cold;
  cold.warm_start = false;
  const auto a = ion_position_curve(plus, p, cold), b = ion_position_curve(minus, p, cold);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].ion_position.x() == doctest::Approx(-b[i].ion_position.x()).epsilon(1e-8));
    CHECK(a[i].ion_position.z() == doctest::Approx(b[i].ion_position.z()).epsilon(1e-8));
  }
}

TEST_CASE("warm and cold curves agree") {
  const auto cfg = config::preset("paper");
  const auto line = scenarios::equilibrium_line(cfg);
  const auto p = scenarios::equilibrium_problem(cfg);
  CurveOptions cold;
  cold.warm_start = false;
  const auto a = ion_position_curve(line, p), b = ion_position_curve(line, p, cold);
  // the force tolerance is 1 nm in the stiffest direction, (4 / 0.8)^2 = 25 nm along z
  for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i].ion_position - b[i].ion_position).norm() < 5e-8);
}

TEST_CASE("curve failures carry the input index") {
  const auto cfg = config::preset("paper");
  CurveOptions opt;
  opt.jump_bound = 1e-9;
  try {
    ion_position_curve(scenarios::equilibrium_line(cfg), scenarios::equilibrium_problem(cfg), opt);
    FAIL("expected a BatchError");
  } catch (const BatchError& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("pair classification") {
  CHECK(classify(Vec3(1, 0, 0)) == PairKind::xy_pair);
  CHECK(classify(Vec3(0, 0, -1)) == PairKind::z_pair);
  double f = 0.0;
  CHECK(classify(Vec3(1, 0, 1), &f) == PairKind::mixed);
  CHECK(f == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("identity schedule leaves positions unchanged") {
  const auto cfg = config::preset("paper");
  const auto pc = scenarios::pair_config(cfg);
  const SetPoint sp = cfg.schedule.front();
  const auto once = solve_pair(pc, sp, std::nullopt, std::nullopt);
  const auto sched = run_schedule({sp, sp}, pc);
  for (const auto& s : sched) {
    CHECK((s.ion_position - once.ion_position).norm() < 1e-9);
    CHECK((s.np_position - once.np_position).norm() < 1e-9);
  }
}

TEST_CASE("raising the +z endcap pushes both particles towards -z") {
  const auto cfg = config::preset("paper");
  const auto pc = scenarios::pair_config(cfg);
  SetPoint sp = cfg.schedule.back();
  const auto a = solve_pair(pc, sp, std::nullopt, std::nullopt);
  sp.endcap_bias += 5.0;
  const auto b = solve_pair(pc, sp, a.ion_position, a.np_position);
  CHECK(b.ion_position.z() < a.ion_position.z());
  CHECK(b.np_position.z() < a.np_position.z());
}

TEST_CASE("preset schedule walks xy -> mixed -> z") {
  const auto cfg = config::preset("paper");
  const auto sol = run_schedule(cfg.schedule, scenarios::pair_config(cfg));
  REQUIRE(sol.size() >= 3);
  CHECK(sol.front().kind == PairKind::xy_pair);
  CHECK(sol.back().kind == PairKind::z_pair);
  bool mixed = false;
  for (const auto& s : sol) {
    mixed = mixed || s.kind == PairKind::mixed;
    CHECK(s.min_curvature > 0.0);
  }
  CHECK(mixed);
}
