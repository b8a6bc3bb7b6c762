#include <cmath>

#include <Eigen/LU>

#include "doctest.h"
#include "dftrap/config.hpp"
#include "dftrap/cooling.hpp"
#include "dftrap/errors.hpp"
#include "dftrap/lyapunov.hpp"
#include "dftrap/scenarios.hpp"
#include "oracles.hpp"

using namespace dftrap;
using namespace dftrap::cooling;

namespace {

const double m_ca = 6.64e-26;

double doppler_hand(const LaserParams& lp, double m) {
  const double k = oracle::kTwoPi / lp.wavelength;
  const double g = lp.linewidth, d = lp.detuning, s = lp.saturation;
  const double den = 1 + s + std::pow(2 * d / g, 2);
  const double rho = 0.5 * s / den;
  const double kappa = 8 * k * d / (g * g) / den;
  return -oracle::kHbar * k * g * rho * kappa / m;
}

}  // namespace

TEST_CASE("Doppler rate by hand and at the quoted working point") {
  const LaserParams lp;
  CHECK(doppler_rate(lp, m_ca) == doctest::Approx(doppler_hand(lp, m_ca)).epsilon(1e-12));
  CHECK(doppler_rate(lp, m_ca) / oracle::kTwoPi == doctest::Approx(10e3).epsilon(0.05));
}

TEST_CASE("Doppler rate vanishes without light and refuses blue detuning") {
  LaserParams lp;
  lp.saturation = 0.0;
  CHECK(doppler_rate(lp, m_ca) == 0.0);
  CHECK(recoil_heating(lp, m_ca) == 0.0);
  lp = LaserParams{};
  lp.detuning = 0.0;
  CHECK_THROWS_AS(doppler_rate(lp, m_ca), DomainError);
  lp.detuning = 1e7;
  CHECK(doppler_rate(lp, m_ca, true) < 0.0);
}

TEST_CASE("Doppler rate peaks at -Gamma sqrt((1 + s) / 3) / 2") {
  // gamma ~ Delta / (1 + s + 4 Delta^2 / Gamma^2)^2
  LaserParams lp;
  const double best = -0.5 * lp.linewidth * std::sqrt((1 + lp.saturation) / 3);
  lp.detuning = best;
  const double g0 = doppler_rate(lp, m_ca);
  for (double f : {0.9, 1.1}) {
    lp.detuning = best * f;
    CHECK(doppler_rate(lp, m_ca) < g0);
  }
}

TEST_CASE("recoil heating") {
  const LaserParams lp;
  CHECK(recoil_heating(lp, m_ca) == doctest::Approx(3.8e-22).epsilon(0.15));
  LaserParams iso = lp;
  iso.emission_factor = 0.0;
  CHECK(recoil_heating(iso, m_ca) / recoil_heating(lp, m_ca) == doctest::Approx(1 / 1.4).epsilon(1e-14));
}

TEST_CASE("force PSDs") {
  const NoiseBudget nb{0.0, 2.8e-26, 1.0, 1.0};
  const auto f = force_psds(nb, {m_ca, 1.6e-17});
  CHECK(f.np == doctest::Approx(5.7e-43).epsilon(0.01));
  CHECK(f.ion == 0.0);
  const auto g = force_psds({0.0, 5.6e-26, 1.0, 1.0}, {m_ca, 1.6e-17});
  CHECK(g.np == doctest::Approx(2 * f.np).epsilon(1e-14));
}

TEST_CASE("decoupled response is a pair of Lorentzians") {
  const modes::CoupledOscillator c{1e6, 1e3, 50.0, 2.0, 0.0, 1e-9};
  for (double w : {10.0, 999.0, 5e5, 2e6}) {
    const auto chi = response_functions(c, w);
    const std::complex<double> li = 1.0 / std::complex<double>(c.omega_ion * c.omega_ion - w * w, w * c.gamma_ion);
    const std::complex<double> ln = 1.0 / std::complex<double>(c.omega_np * c.omega_np - w * w, w * c.gamma_np);
    CHECK(std::abs(chi(0, 0) - li) < 1e-12 * std::abs(li));
    CHECK(std::abs(chi(1, 1) - ln) < 1e-12 * std::abs(ln));
    CHECK(std::abs(chi(0, 1)) == 0.0);
    CHECK(std::abs(chi(1, 0)) == 0.0);
  }
}

TEST_CASE("static compliance inverts the stiffness") {
  auto c = scenarios::cooling_axis(config::preset("paper"), Axis::z);
  c.gamma_ion = 1e4;
  c.gamma_np = 0.4;
  const auto chi = response_functions(c, 0.0);
  Eigen::Matrix2d K;
  K << c.omega_ion * c.omega_ion - c.coupling_j, c.coupling_j, c.mu * c.coupling_j,
      c.omega_np * c.omega_np - c.mu * c.coupling_j;
  const Eigen::Matrix2d inv = K.inverse();
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) CHECK(chi(i, k).real() == doctest::Approx(inv(i, k)).epsilon(1e-10));
}

TEST_CASE("undamped response poles sit on the mode frequencies") {
  for (Axis a : {Axis::x, Axis::z}) {
    const auto c = scenarios::cooling_axis(config::preset("paper"), a);
    const auto m = modes::eigenmodes(c);
    for (const auto* mode : {&m.in, &m.out}) {
      const double w = std::abs(mode->lambda);
      // det of the dynamical matrix is the characteristic polynomial at s = i w
      const double scale = std::pow(std::max(c.omega_ion, w), 4);
      CHECK(std::abs(c.characteristic({0.0, w})) / scale < 1e-9);
      // the compliance blows up approaching the pole
      CHECK(std::abs(response_functions(c, w * (1 + 1e-9))(0, 0)) >
            1e3 * std::abs(response_functions(c, w * 1.01)(0, 0)));
    }
  }
}

TEST_CASE("Lyapunov solve of a damped oscillator") {
  const double w = 3.0, g = 0.2, d = 0.7;
  Eigen::MatrixXd A(2, 2), D = Eigen::MatrixXd::Zero(2, 2);
  A << 0, 1, -w * w, -g;
  D(1, 1) = d;
  const auto S = lyapunov::solve_continuous(A, D);
  CHECK(S(0, 0) == doctest::Approx(d / (2 * g * w * w)).epsilon(1e-12));
  CHECK(S(1, 1) == doctest::Approx(d / (2 * g)).epsilon(1e-12));
  CHECK(std::abs(S(0, 1)) < 1e-12);
  CHECK((A * S + S * A.transpose() + D).norm() < 1e-12);
  CHECK(lyapunov::min_scaled_eigenvalue(S) == doctest::Approx(1.0));
}

TEST_CASE("Lyapunov refuses an unstable drift matrix") {
  Eigen::MatrixXd A(2, 2), D = Eigen::MatrixXd::Identity(2, 2);
  A << 0, 1, -1, 0.3;
  CHECK_THROWS_AS(lyapunov::solve_continuous(A, D), ConvergenceError);
}

TEST_CASE("uncoupled temperatures are E / (gamma kB)") {
  const auto cfg = config::preset("paper");
  auto c = scenarios::cooling_axis(cfg, Axis::z);
  c.coupling_j = 0.0;
  const auto nb = scenarios::noise_budget(cfg);
  for (Method m : {Method::lyapunov, Method::spectral}) {
    CAPTURE(to_string(m));
    const auto r = displacement_psd_and_temperature(c, nb, scenarios::cooling_masses(cfg), m);
    const double eps = m == Method::lyapunov ? 1e-9 : 0.02;
    CHECK(r.T_ion == doctest::Approx(nb.heating_ion / (nb.gamma_ion * oracle::kBoltzmann)).epsilon(eps));
    CHECK(r.T_np == doctest::Approx(nb.heating_np / (nb.gamma_np * oracle::kBoltzmann)).epsilon(eps));
  }
}

TEST_CASE("sympathetic temperatures and method agreement") {
  const auto cfg = config::preset("paper");
  const auto nb = scenarios::noise_budget(cfg);
  const auto m = scenarios::cooling_masses(cfg);
  for (auto [axis, target] : {std::pair{Axis::x, 2280.0}, {Axis::z, 17.0}}) {
    CAPTURE(to_string(axis));
    const auto c = scenarios::cooling_axis(cfg, axis);
    const auto ly = displacement_psd_and_temperature(c, nb, m, Method::lyapunov);
    const auto sp = displacement_psd_and_temperature(c, nb, m, Method::spectral);
    CHECK(ly.T_np == doctest::Approx(target).epsilon(0.05));
    CHECK(sp.T_np == doctest::Approx(ly.T_np).epsilon(0.02));
    CHECK(sp.T_ion == doctest::Approx(ly.T_ion).epsilon(0.02));
    CHECK(ly.min_covariance_eig > 0.0);
  }
}

TEST_CASE("PSDs are non-negative and linear in the force PSD") {
  const auto cfg = config::preset("paper");
  auto c = scenarios::cooling_axis(cfg, Axis::x);
  c.gamma_ion = scenarios::noise_budget(cfg).gamma_ion;
  c.gamma_np = cfg.noise.gamma_np;
  const auto grid = default_psd_grid(c, 20);
  const auto m = scenarios::cooling_masses(cfg);
  ForcePsds f{1e-40, 3e-43};
  std::vector<double> si, sn, si2, sn2;
  psd_on_grid(c, f, m, grid, si, sn, Execution::serial);
  psd_on_grid(c, {2 * f.ion, 2 * f.np}, m, grid, si2, sn2, Execution::serial);
  REQUIRE(si.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(si[i] >= 0.0);
    CHECK(sn[i] >= 0.0);
    CHECK(si2[i] == doctest::Approx(2 * si[i]).epsilon(1e-13));
    CHECK(sn2[i] == doctest::Approx(2 * sn[i]).epsilon(1e-13));
  }
}

TEST_CASE("stronger Doppler cooling lowers both temperatures along z") {
  const auto cfg = config::preset("paper");
  const auto c = scenarios::cooling_axis(cfg, Axis::z);
  const auto m = scenarios::cooling_masses(cfg);
  double t_ion = INFINITY, t_np = INFINITY;
  for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    auto nb = scenarios::noise_budget(cfg);
    nb.gamma_ion *= f;
    const auto r = displacement_psd_and_temperature(c, nb, m, Method::lyapunov);
    CHECK(r.T_ion < t_ion);
    CHECK(r.T_np < t_np);
    t_ion = r.T_ion;
    t_np = r.T_np;
  }
}

TEST_CASE("cooling needs damping on the nanoparticle") {
  const auto cfg = config::preset("paper");
  auto nb = scenarios::noise_budget(cfg);
  nb.gamma_np = 0.0;
  CHECK_THROWS_AS(displacement_psd_and_temperature(scenarios::cooling_axis(cfg, Axis::x), nb,
                                                   scenarios::cooling_masses(cfg), Method::lyapunov),
                  DomainError);
}
