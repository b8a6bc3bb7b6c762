#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "dftrap/equilibrium.hpp"
#include "dftrap/modes.hpp"
#include "oracles.hpp"

using namespace dftrap;
using namespace dftrap::modes;

namespace {

const double w = oracle::kTwoPi;

CoupledOscillator reference_axis(Axis a) {
  return axis_oscillator(a, presets::calcium_ion(), presets::nanoparticle(), 0.0, 0.0);
}

}  // namespace

TEST_CASE("axis oscillators use the on-axis coupling") {
  const auto x = reference_axis(Axis::x), z = reference_axis(Axis::z);
  CHECK(x.coupling_j == doctest::Approx(std::pow(w * 0.8e6, 2)));
  CHECK(z.coupling_j == doctest::Approx(-2 * std::pow(w * 0.8e6, 2)));
  CHECK(x.mu == doctest::Approx(6.64e-26 / 2e-17).epsilon(1e-3));
  CHECK(x.omega_np == doctest::Approx(w * 1.5e3));
}

TEST_CASE("matrix entries by hand") {
  CoupledOscillator c{2.0, 3.0, 0.5, 0.25, 1.5, 0.1};
  const auto M = build_matrix(c);
  CHECK(M(0, 2) == 1.0);
  CHECK(M(1, 3) == 1.0);
  CHECK(M(2, 0) == doctest::Approx(-4.0 + 1.5));
  CHECK(M(2, 1) == doctest::Approx(-1.5));
  CHECK(M(3, 0) == doctest::Approx(-0.15));
  CHECK(M(3, 1) == doctest::Approx(-9.0 + 0.15));
  CHECK(M(2, 2) == -0.5);
  CHECK(M(3, 3) == -0.25);
  CHECK(M.trace() == doctest::Approx(-(c.gamma_ion + c.gamma_np)));
  const double det_hand = (4.0 - 1.5) * (9.0 - 0.15) - 0.1 * 1.5 * 1.5;
  CHECK(M.determinant() == doctest::Approx(det_hand));
}

TEST_CASE("decoupled oscillators") {
  CoupledOscillator c{w * 4e6, w * 1.5e3, 0.0, 0.0, 0.0, 3e-9};
  const auto m = eigenmodes(c);
  CHECK(std::abs(m.ion_mode().lambda.imag() - c.omega_ion) / c.omega_ion < 1e-12);
  CHECK(std::abs(m.np_mode().lambda.imag() - c.omega_np) / c.omega_np < 1e-12);
  CHECK(std::abs(m.np_mode().evec[0]) < 1e-12);
}

TEST_CASE("undamped spectrum is imaginary and closed under conjugation") {
  for (Axis a : {Axis::x, Axis::z}) {
    const auto M = build_matrix(reference_axis(a));
    Eigen::EigenSolver<Eigen::Matrix4d> es(M);
    const auto ev = es.eigenvalues();
    for (int i = 0; i < 4; ++i) {
      // dense eigenvalues carry roundoff of order eps |M|
      CHECK(std::abs(ev[i].real()) < 1e-12 * M.norm());
      bool partner = false;
      for (int k = 0; k < 4; ++k) partner = partner || std::abs(ev[k] - std::conj(ev[i])) < 1e-8 * std::abs(ev[i]);
      CHECK(partner);
    }
    const auto m = eigenmodes(reference_axis(a));
    CHECK(std::abs(m.in.lambda.real()) < 1e-10 * std::abs(m.in.lambda));
    CHECK(m.in.residual < 1e-9);
    CHECK(m.out.residual < 1e-9);
  }
}

TEST_CASE("eigen table") {
  const auto x = eigenmodes(reference_axis(Axis::x)), z = eigenmodes(reference_axis(Axis::z));
  CHECK(x.in.freq_hz() == doctest::Approx(3.92e6).epsilon(0.005));
  CHECK(x.out.freq_hz() == doctest::Approx(1.5e3).epsilon(0.005));
  CHECK(z.in.freq_hz() == doctest::Approx(1.0e3).epsilon(0.005));
  CHECK(z.out.freq_hz() == doctest::Approx(1.38e6).epsilon(0.005));
  CHECK(z.out.freq_hz() == doctest::Approx(std::sqrt(3.0) * 0.8e6).epsilon(1e-6));
  // characteristic polynomial vanishes at the eigenvalues
  for (const auto* m : {&x.in, &x.out, &z.in, &z.out}) {
    const auto c = m == &x.in || m == &x.out ? reference_axis(Axis::x) : reference_axis(Axis::z);
    const double scale = std::pow(std::max(c.omega_ion, std::abs(m->lambda)), 4);
    CHECK(std::abs(c.characteristic(m->lambda)) / scale < 1e-9);
  }
}

TEST_CASE("in/out labelling follows the relative phase") {
  for (Axis a : {Axis::x, Axis::y, Axis::z}) {
    const auto m = eigenmodes(reference_axis(a));
    CHECK((m.in.evec[0] * std::conj(m.in.evec[1])).real() >= 0.0);
    CHECK((m.out.evec[0] * std::conj(m.out.evec[1])).real() <= 0.0);
    CHECK(m.ion_mode().ion_dominated);
  }
}

TEST_CASE("radial coupling equals w_z^2 at the on-axis separation") {
  const auto ion = presets::calcium_ion();
  equilibrium::EquilibriumProblem p;
  p.ion = ion;
  const auto s = equilibrium::solve_ion_equilibrium(p, 1e-4 * equilibrium::default_force_tolerance(ion));
  const double j = radial_coupling(ion.charge_coulomb(), 800 * oracle::kE, s.ion_position.norm(), ion.mass);
  CHECK(j == doctest::Approx(std::pow((*ion.omega_sec)[2], 2)).epsilon(1e-7));
}

TEST_CASE("mu -> 0 deviations are first order in mu") {
  // the nanoparticle-like deviation is mu j / (2 w_np^2), so it is linear in mu
  // with a large prefactor (w_z,i / w_np)^2
  auto deviations = [](double mu) {
    std::vector<std::pair<std::string, CoupledOscillator>> axes;
    for (Axis a : {Axis::x, Axis::z}) {
      auto c = reference_axis(a);
      c.mu = mu;
      axes.emplace_back(to_string(a), c);
    }
    return mu_zero_limit_check(axes);
  };
  const auto a = deviations(1e-10), b = deviations(1e-11);
  REQUIRE(a.entries.size() == 4);
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CAPTURE(a.entries[i].label);
    if (b.entries[i].rel_dev > 1e-12)
      CHECK(a.entries[i].rel_dev == doctest::Approx(10 * b.entries[i].rel_dev).epsilon(0.02));
    const auto c = reference_axis(i < 2 ? Axis::x : Axis::z);
    if (a.entries[i].closed_form < 1e5)
      CHECK(a.entries[i].rel_dev == doctest::Approx(1e-10 * std::abs(c.coupling_j) / (2 * c.omega_np * c.omega_np)).epsilon(0.02));
  }
}

TEST_CASE("ion-like closed forms hold at the reference mass ratio") {
  const auto r = mu_zero_limit_check({{"x", reference_axis(Axis::x)}, {"z", reference_axis(Axis::z)}});
  for (const auto& e : r.entries) {
    CAPTURE(e.label);
    if (e.closed_form > 1e5) CHECK(e.rel_dev < 1e-4);
  }
}

TEST_SUITE("literal_examples") {
  // The nanoparticle-like deviation is mu j / (2 w_np^2): 4.7e-4 on x and 9.4e-4 on z
  // at the reference mass ratio, and far above 10 mu at mu = 1e-3.
  TEST_CASE("mu -> 0 closed forms within 1e-4 at the reference mass ratio") {
    const auto r = mu_zero_limit_check({{"x", reference_axis(Axis::x)}, {"z", reference_axis(Axis::z)}});
    for (const auto& e : r.entries) {
      CAPTURE(e.label);
      CHECK(e.rel_dev < 1e-4);
    }
  }

  TEST_CASE("mu = 1e-3: deviations below 10 mu") {
    std::vector<std::pair<std::string, CoupledOscillator>> axes;
    for (Axis a : {Axis::x, Axis::z}) {
      auto c = reference_axis(a);
      c.mu = 1e-3;
      axes.emplace_back(to_string(a), c);
    }
    CHECK(mu_zero_limit_check(axes).max_rel_dev() < 10 * 1e-3);
  }
}

TEST_CASE("radial-axial degeneracy gives a zero mode") {
  auto c = reference_axis(Axis::x);
  c.omega_ion = std::sqrt(c.coupling_j);
  c.mu = 1e-22;
  const auto m = eigenmodes(c);
  // with no net restoring force the ion dominates both eigenvectors, so pick by frequency
  CHECK(std::min(std::abs(m.in.lambda), std::abs(m.out.lambda)) < 1e-6 * c.omega_ion);
}

TEST_CASE("invalid oscillator") {
  CoupledOscillator c{1.0, 1.0, 0.0, 0.0, 0.0, -1.0};
  CHECK_THROWS_AS(c.validate(), DomainError);
}
