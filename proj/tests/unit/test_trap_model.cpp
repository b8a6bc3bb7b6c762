#include <cmath>

#include "doctest.h"
#include "dftrap/errors.hpp"
#include "dftrap/trap_model.hpp"
#include "oracles.hpp"

using namespace dftrap;

namespace {

TrapConfig trap() { return presets::reference_trap(); }
ParticleSpec ion() { return presets::calcium_ion(); }
ParticleSpec np() { return presets::nanoparticle(); }

}  // namespace

TEST_CASE("q_param: ion on the fast drive") {
  // 2 kappa Q V / (m r0^2 Omega^2) by hand
  const double omega = oracle::kTwoPi * 17.5e6;
  const double hand = 2 * 0.93 * oracle::kE * 1250.0 / (6.64e-26 * 0.9e-3 * 0.9e-3 * omega * omega);
  const double q = q_param(trap(), ion(), Drive::fast);
  CHECK(q == doctest::Approx(hand).epsilon(1e-3));
  // quoted working point is q = 0.55; the formula with the listed inputs gives 0.573
  CHECK(std::abs(q - 0.55) / 0.55 < 0.05);
}

TEST_CASE("q_param: zero amplitude gives zero") {
  TrapConfig t = trap();
  t.v_fast = 0.0;
  t.v_slow = 0.0;
  CHECK(q_param(t, ion(), Drive::fast) == 0.0);
  CHECK(q_param(t, np(), Drive::slow) == 0.0);
}

TEST_CASE("q_param: zero frequency is a domain error") {
  TrapConfig t = trap();
  t.omega_fast = 0.0;
  CHECK_THROWS_AS(q_param(t, ion(), Drive::fast), DomainError);
}

TEST_CASE("nanoparticle on the slow drive, cross-checked by the secular formula") {
  const double q = q_param(trap(), np(), Drive::slow);
  CHECK(q == doctest::Approx(0.57).epsilon(0.03));
  const auto s = secular_frequency(trap(), np(), Drive::slow);
  CHECK_FALSE(s.outside_validity);
  const double f = s.omega / oracle::kTwoPi;
  CHECK(f == doctest::Approx(7e3 * q / (2 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(std::abs(f - 1.5e3) / 1.5e3 < 0.10);
}

TEST_CASE("ion secular frequency within 20% of the nominal 4 MHz") {
  const double f = secular_frequency(trap(), ion(), Drive::fast).omega / oracle::kTwoPi;
  CHECK(f == doctest::Approx(3.4e6).epsilon(0.05));
  CHECK(std::abs(f - 4e6) / 4e6 < 0.20);
}

TEST_CASE("secular frequency goes to zero with q and flags large q") {
  TrapConfig t = trap();
  t.v_fast = 1e-9;
  CHECK(secular_frequency(t, ion(), Drive::fast).omega < 1e-3);
  t.v_fast = 5000.0;
  CHECK(secular_frequency(t, ion(), Drive::fast).outside_validity);
}

TEST_CASE("fast-to-slow stiffness ratio") {
  CHECK(fast_to_slow_stiffness_ratio(trap()) == doctest::Approx((7e3 / 17.5e6) * (1250.0 / 75.0)));
  CHECK(fast_to_slow_stiffness_ratio(trap()) == doctest::Approx(6.7e-3).epsilon(0.01));
  TrapConfig t = trap();
  t.v_fast = 0.0;
  CHECK(fast_to_slow_stiffness_ratio(t) == 0.0);
  t.v_fast = t.v_slow;
  t.omega_fast = t.omega_slow;
  CHECK(fast_to_slow_stiffness_ratio(t) == doctest::Approx(1.0));
  t.v_slow = 0.0;
  CHECK_THROWS_AS(fast_to_slow_stiffness_ratio(t), DomainError);
}

TEST_CASE("a_eff at the 260 Vpp threshold") {
  TrapConfig t = trap();
  t.v_slow = 130.0;
  CHECK(a_eff_param(t, ion()) == doctest::Approx(0.119).epsilon(0.03));
  t.v_slow = 0.0;
  CHECK(a_eff_param(t, ion()) == 0.0);
}

TEST_CASE("v_slow_for_a_eff inverts a_eff_param") {
  TrapConfig t = trap();
  for (double a : {-0.2, -0.01, 0.03, 0.119}) {
    t.v_slow = v_slow_for_a_eff(t, ion(), a);
    CHECK(a_eff_param(t, ion()) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("approximate co-trapping check") {
  CHECK(approx_stability_check({0.119, 0.55}));
  CHECK(approx_stability_check({0.06, 0.4}));
  CHECK_FALSE(approx_stability_check({0.01, 0.0}));
  CHECK_FALSE(approx_stability_check({0.2, 0.55}));
}

TEST_CASE("particle validation") {
  ParticleSpec p = ion();
  p.mass = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  TrapConfig t = trap();
  t.r0 = 0.0;
  CHECK_THROWS_AS(t.validate(), DomainError);
}
