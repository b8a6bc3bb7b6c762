#include "dftrap/cooling.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/core.h>
#include <omp.h>

#include "dftrap/constants.hpp"
#include "dftrap/errors.hpp"
#include "dftrap/lyapunov.hpp"

namespace dftrap::cooling {

using modes::CoupledOscillator;
using cplx = std::complex<double>;

void LaserParams::validate() const {
  if (!(wavelength > 0.0)) throw DomainError("laser: wavelength must be positive");
  if (!(linewidth > 0.0)) throw DomainError("laser: linewidth must be positive");
  if (saturation < 0.0) throw DomainError("laser: saturation must be >= 0");
  if (emission_factor < 0.0) throw DomainError("laser: emission factor must be >= 0");
}

double LaserParams::wavenumber() const { return constants::two_pi / wavelength; }

double LaserParams::excitation() const {
  const double x = 2.0 * detuning / linewidth;
  return 0.5 * saturation / (1.0 + saturation + x * x);
}

double doppler_rate(const LaserParams& lp, double m_ion, bool allow_heating) {
  lp.validate();
  if (!(m_ion > 0.0)) throw DomainError("doppler: mass must be positive");
  if (lp.detuning >= 0.0 && !allow_heating)
    throw DomainError("doppler: detuning >= 0 heats the ion");
  const double k = lp.wavenumber();
  const double x = 2.0 * lp.detuning / lp.linewidth;
  const double denom = 1.0 + lp.saturation + x * x;
  const double f0 = constants::hbar * k * lp.linewidth * lp.excitation();
  const double kappa = 8.0 * k * lp.detuning / (lp.linewidth * lp.linewidth) / denom;
  return -f0 * kappa / m_ion;
}

double recoil_heating(const LaserParams& lp, double m_ion) {
  lp.validate();
  if (!(m_ion > 0.0)) throw DomainError("recoil: mass must be positive");
  const double hk = constants::hbar * lp.wavenumber();
  return hk * hk * lp.linewidth * (1.0 + lp.emission_factor) / (2.0 * m_ion) * lp.excitation();
}

void NoiseBudget::validate() const {
  if (heating_ion < 0.0 || heating_np < 0.0 || gamma_ion < 0.0 || gamma_np < 0.0)
    throw DomainError("noise budget: rates must be >= 0");
}

ForcePsds force_psds(const NoiseBudget& nb, const Masses& m) {
  nb.validate();
  return {4.0 * m.ion * nb.heating_ion / constants::pi, 4.0 * m.np * nb.heating_np / constants::pi};
}

namespace {

struct Dyn {
  cplx d11, d12, d21, d22, det;
};

Dyn dynamical(const CoupledOscillator& c, double w) {
  const double j = c.coupling_j;
  Dyn d;
  d.d11 = cplx(c.omega_ion * c.omega_ion - j - w * w, w * c.gamma_ion);
  d.d12 = j;
  d.d21 = c.mu * j;
  d.d22 = cplx(c.omega_np * c.omega_np - c.mu * j - w * w, w * c.gamma_np);
  d.det = d.d11 * d.d22 - d.d12 * d.d21;
  return d;
}

// S_qq for both particles at one frequency; fi, fn are per-mass force PSDs.
std::pair<double, double> displacement_psd(const CoupledOscillator& c, double w, double fi, double fn) {
  const Dyn d = dynamical(c, w);
  const double inv = 1.0 / std::norm(d.det);
  // chi = adj(D) / det
  const double s_ion = (std::norm(d.d22) * fi + std::norm(d.d12) * fn) * inv;
  const double s_np = (std::norm(d.d21) * fi + std::norm(d.d11) * fn) * inv;
  return {s_ion, s_np};
}

std::vector<double> breakpoints(const CoupledOscillator& c, double& w_hi) {
  const modes::ModePair mp = modes::eigenmodes(c);
  std::vector<std::pair<double, double>> poles;
  for (const modes::Mode* m : {&mp.in, &mp.out}) {
    const double w0 = std::abs(m->lambda.imag());
    const double g = std::max(std::abs(m->lambda.real()), 1e-12 * w0);
    poles.emplace_back(w0, g);
  }
  double lo = std::min(poles[0].first, poles[1].first);
  double hi = std::max(poles[0].first, poles[1].first);
  if (!(lo > 0.0)) lo = std::min(c.omega_np, c.omega_ion);
  const double w_lo = 1e-3 * lo;
  w_hi = 1e3 * hi;

  std::vector<double> b{0.0, w_lo, w_hi};
  const int per_decade = 8;
  const double decades = std::log10(w_hi / w_lo);
  const int nlog = static_cast<int>(std::ceil(decades * per_decade));
  for (int i = 1; i < nlog; ++i) b.push_back(w_lo * std::pow(10.0, decades * i / nlog));
  // geometric ladder of widths on both sides of every pole
  for (auto [w0, g] : poles) {
    b.push_back(w0);
    for (double f = 1.0; f <= 1e4 * 1.0001; f *= std::sqrt(10.0)) {
      b.push_back(w0 - f * g);
      b.push_back(w0 + f * g);
    }
  }
  std::erase_if(b, [&](double x) { return !(x >= 0.0 && x <= w_hi); });
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

}  // namespace

Eigen::Matrix2cd response_functions(const CoupledOscillator& c, double omega) {
  if (omega < 0.0) throw DomainError("response: omega must be >= 0");
  const Dyn d = dynamical(c, omega);
  const double scale = std::abs(d.d11 * d.d22) + std::abs(d.d12 * d.d21);
  if (std::abs(d.det) <= 4.0 * std::numeric_limits<double>::epsilon() * scale)
    throw SingularityError(fmt::format("response: singular dynamical matrix at omega = {} rad/s", omega));
  Eigen::Matrix2cd chi;
  chi << d.d22, -d.d12, -d.d21, d.d11;
  return chi / d.det;
}

const char* to_string(Method m) { return m == Method::spectral ? "spectral" : "lyapunov"; }

void psd_on_grid(const CoupledOscillator& c, const ForcePsds& f, const Masses& m, const std::vector<double>& omega,
                 std::vector<double>& s_ion, std::vector<double>& s_np, Execution exec) {
  const double fi = f.ion / (m.ion * m.ion), fn = f.np / (m.np * m.np);
  s_ion.assign(omega.size(), 0.0);
  s_np.assign(omega.size(), 0.0);
  const long n = static_cast<long>(omega.size());
  auto eval = [&](long k) {
    const auto [a, b] = displacement_psd(c, omega[k], fi, fn);
    s_ion[k] = a;
    s_np[k] = b;
  };
  if (exec == Execution::serial) {
    for (long k = 0; k < n; ++k) eval(k);
    return;
  }
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (long k = 0; k < n; ++k) eval(k);
}

std::vector<double> default_psd_grid(const CoupledOscillator& c, int per_decade) {
  const modes::ModePair mp = modes::eigenmodes(c);
  const double lo = std::min(std::abs(mp.in.lambda.imag()), std::abs(mp.out.lambda.imag()));
  const double hi = std::max(std::abs(mp.in.lambda.imag()), std::abs(mp.out.lambda.imag()));
  const double a = 1e-2 * (lo > 0.0 ? lo : c.omega_np), b = 1e2 * hi;
  const int n = std::max(2, static_cast<int>(std::ceil(std::log10(b / a) * per_decade)));
  std::vector<double> g;
  for (int i = 0; i <= n; ++i) g.push_back(a * std::pow(b / a, static_cast<double>(i) / n));
  for (const modes::Mode* m : {&mp.in, &mp.out}) {
    const double w0 = std::abs(m->lambda.imag());
    const double w = std::max(std::abs(m->lambda.real()), 1e-12 * w0);
    for (int i = -20; i <= 20; ++i) g.push_back(w0 + w * i / 4.0);
  }
  std::erase_if(g, [](double x) { return !(x > 0.0); });
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

SpectrumResult displacement_psd_and_temperature(CoupledOscillator c, const NoiseBudget& nb, const Masses& m,
                                                Method method, const TemperatureOptions& opt) {
  nb.validate();
  if (!(m.ion > 0.0 && m.np > 0.0)) throw DomainError("cooling: masses must be positive");
  if (!(nb.gamma_np > 0.0)) throw DomainError("cooling: nanoparticle damping must be positive");
  c.gamma_ion = nb.gamma_ion;
  c.gamma_np = nb.gamma_np;
  c.validate();
  {
    const modes::ModePair mp = modes::eigenmodes(c);
    for (const modes::Mode* md : {&mp.in, &mp.out})
      if (!(md->lambda.real() < 0.0))
        throw ConvergenceError(fmt::format("cooling: mode at {:.6g} Hz is not damped (Re = {:.3g})",
                                           md->freq_hz(), md->lambda.real()));
  }
  const ForcePsds f = force_psds(nb, m);
  SpectrumResult r;
  r.method = method;

  if (method == Method::lyapunov) {
    const Eigen::Matrix4d A = modes::build_matrix(c);
    Eigen::Matrix4d D = Eigen::Matrix4d::Zero();
    // white force with <F(t)F(t')> = 2 m E' delta(t - t'), per mass squared
    D(2, 2) = 2.0 * nb.heating_ion / m.ion;
    D(3, 3) = 2.0 * nb.heating_np / m.np;
    const Eigen::MatrixXd S = lyapunov::solve_continuous(A, D);
    r.T_ion = m.ion * S(2, 2) / constants::boltzmann;
    r.T_np = m.np * S(3, 3) / constants::boltzmann;
    r.min_covariance_eig = lyapunov::min_scaled_eigenvalue(S);
  } else {
    const double fi = f.ion / (m.ion * m.ion), fn = f.np / (m.np * m.np);
    double w_hi = 0.0;
    const std::vector<double> b = breakpoints(c, w_hi);
    const long npanels = static_cast<long>(b.size()) - 1;
    std::vector<double> vi(npanels + 1, 0.0), vn(npanels + 1, 0.0);
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto panel = [&](long k) {
      const double a0 = b[k], a1 = b[k + 1];
      auto gi = [&](double w) { return w * w * displacement_psd(c, w, fi, fn).first; };
      auto gn = [&](double w) { return w * w * displacement_psd(c, w, fi, fn).second; };
      vi[k] = GK::integrate(gi, a0, a1, 12, opt.quad_tol);
      vn[k] = GK::integrate(gn, a0, a1, 12, opt.quad_tol);
    };
    auto tail = [&] {
      // w = W / t maps [W, inf) onto (0, 1]
      auto gi = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double w = w_hi / t;
        return w * w * displacement_psd(c, w, fi, fn).first * w_hi / (t * t);
      };
      auto gn = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double w = w_hi / t;
        return w * w * displacement_psd(c, w, fi, fn).second * w_hi / (t * t);
      };
      vi[npanels] = GK::integrate(gi, 0.0, 1.0, 12, opt.quad_tol);
      vn[npanels] = GK::integrate(gn, 0.0, 1.0, 12, opt.quad_tol);
    };
    std::vector<std::exception_ptr> errs(npanels + 1);
    if (opt.exec == Execution::serial) {
      for (long k = 0; k < npanels; ++k) panel(k);
      tail();
    } else {
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
      for (long k = 0; k <= npanels; ++k) {
        try {
          if (k < npanels)
            panel(k);
          else
            tail();
        } catch (...) {
          errs[k] = std::current_exception();
        }
      }
      for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    }
    // fixed-order reduction keeps the sum independent of the thread count
    double si = 0.0, sn = 0.0;
    for (long k = 0; k <= npanels; ++k) {
      si += vi[k];
      sn += vn[k];
    }
    r.T_ion = m.ion * 0.5 * si / constants::boltzmann;
    r.T_np = m.np * 0.5 * sn / constants::boltzmann;
    if (!std::isfinite(r.T_ion) || !std::isfinite(r.T_np))
      throw ConvergenceError("cooling: spectral quadrature produced a non-finite result");
  }

  if (!opt.psd_grid.empty()) {
    r.omega = opt.psd_grid;
    psd_on_grid(c, f, m, r.omega, r.S_ion, r.S_np, opt.exec);
  }
  return r;
}

}  // namespace dftrap::cooling
