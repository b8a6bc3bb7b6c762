#include "dftrap/modes.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/core.h>

#include "dftrap/constants.hpp"
#include "dftrap/errors.hpp"

namespace dftrap::modes {

void CoupledOscillator::validate() const {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("modes: mass ratio must lie in (0, 1)");
  if (!(omega_ion > 0.0 && omega_np > 0.0)) throw DomainError("modes: frequencies must be positive");
  if (gamma_ion < 0.0 || gamma_np < 0.0) throw DomainError("modes: damping must be non-negative");
}

cplx CoupledOscillator::characteristic(cplx s) const {
  const cplx a = s * s + gamma_ion * s + (omega_ion * omega_ion - coupling_j);
  const cplx b = s * s + gamma_np * s + (omega_np * omega_np - mu * coupling_j);
  return a * b - mu * coupling_j * coupling_j;
}

double radial_coupling(double q_ion, double q_np, double separation, double m_ion) {
  if (!(separation > 0.0) || !(m_ion > 0.0)) throw DomainError("coupling: need positive separation and mass");
  return constants::coulomb_k * q_ion * q_np / (separation * separation * separation * m_ion);
}

CoupledOscillator axis_oscillator(Axis axis, const ParticleSpec& ion, const ParticleSpec& np,
                                  double gamma_ion, double gamma_np) {
  if (!ion.omega_sec || !np.omega_sec) throw DomainError("modes: both particles need secular frequencies");
  const int k = index(axis);
  const double wz = (*ion.omega_sec)[2];
  CoupledOscillator c;
  c.omega_ion = (*ion.omega_sec)[k];
  c.omega_np = (*np.omega_sec)[k];
  c.gamma_ion = gamma_ion;
  c.gamma_np = gamma_np;
  c.coupling_j = axis == Axis::z ? -2.0 * wz * wz : wz * wz;
  c.mu = ion.mass / np.mass;
  return c;
}

Eigen::Matrix4d build_matrix(const CoupledOscillator& c) {
  const double j = c.coupling_j;
  Eigen::Matrix4d m;
  m << 0.0, 0.0, 1.0, 0.0,
       0.0, 0.0, 0.0, 1.0,
       -c.omega_ion * c.omega_ion + j, -j, -c.gamma_ion, 0.0,
       -c.mu * j, -c.omega_np * c.omega_np + c.mu * j, 0.0, -c.gamma_np;
  return m;
}

double Mode::freq_hz() const { return std::abs(lambda) / constants::two_pi; }

namespace {

cplx newton_refine(const CoupledOscillator& c, cplx s) {
  const cplx s0 = s;
  for (int it = 0; it < 60; ++it) {
    const cplx a = s * s + c.gamma_ion * s + (c.omega_ion * c.omega_ion - c.coupling_j);
    const cplx b = s * s + c.gamma_np * s + (c.omega_np * c.omega_np - c.mu * c.coupling_j);
    const cplx f = a * b - c.mu * c.coupling_j * c.coupling_j;
    const cplx df = (2.0 * s + c.gamma_ion) * b + a * (2.0 * s + c.gamma_np);
    if (df == cplx(0.0)) break;
    const cplx ds = f / df;
    s -= ds;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) return s0;
    if (std::abs(ds) <= 1e-16 * std::abs(s)) break;
  }
  // a wandering iterate means the dense estimate was already the better root
  if (std::abs(s - s0) > 1e-3 * std::max(std::abs(s0), 1.0)) return s0;
  return s;
}

Mode make_mode(const CoupledOscillator& c, cplx s, const Eigen::Matrix4d& M) {
  const double j = c.coupling_j;
  const cplx A = s * s + c.gamma_ion * s + (c.omega_ion * c.omega_ion - j);
  const cplx B = s * s + c.gamma_np * s + (c.omega_np * c.omega_np - c.mu * j);
  // null vector of whichever row of [[A, j], [mu j, B]] is better conditioned
  const double n1 = std::max(std::abs(A), std::abs(j));
  const double n2 = std::max(std::abs(c.mu * j), std::abs(B));
  cplx a, b;
  if (n1 == 0.0 && n2 == 0.0) {
    a = 1.0;
    b = 0.0;
  } else if (n1 >= n2) {
    a = j;
    b = -A;
  } else {
    a = B;
    b = -c.mu * j;
  }
  const cplx big = std::abs(a) >= std::abs(b) ? a : b;
  a /= big;
  b /= big;
  if (std::abs(a) > 0.0) {
    const cplx ph = std::conj(a) / std::abs(a);
    a *= ph;
    b *= ph;
  }
  Mode m;
  m.lambda = s;
  m.evec = {a, b};
  m.ion_dominated = std::abs(a) >= std::abs(b);
  Eigen::Vector4cd v(a, b, s * a, s * b);
  const Eigen::Vector4cd r = M.cast<cplx>() * v - s * v;
  m.residual = r.norm() / (M.norm() * v.norm());
  return m;
}

}  // namespace

ModePair eigenmodes(const CoupledOscillator& c) {
  c.validate();
  const Eigen::Matrix4d M = build_matrix(c);
  Eigen::EigenSolver<Eigen::Matrix4d> es(M, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("modes: eigen-decomposition failed");
  std::array<cplx, 4> ev;
  for (int i = 0; i < 4; ++i) ev[i] = es.eigenvalues()[i];
  // the upper half-plane representatives of the conjugate pairs
  std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) { return x.imag() > y.imag(); });

  std::array<Mode, 2> m;
  for (int i = 0; i < 2; ++i) {
    cplx s = newton_refine(c, ev[i]);
    if (s.imag() < 0.0) s = std::conj(s);
    m[i] = make_mode(c, s, M);
  }
  const double p0 = (m[0].evec[0] * std::conj(m[0].evec[1])).real();
  const double p1 = (m[1].evec[0] * std::conj(m[1].evec[1])).real();
  ModePair out;
  const bool first_in = p0 > 0.0 && p1 <= 0.0 ? true : (p1 > 0.0 && p0 <= 0.0 ? false : p0 >= p1);
  out.in = first_in ? m[0] : m[1];
  out.out = first_in ? m[1] : m[0];
  out.degenerate =
      std::abs(out.in.lambda - out.out.lambda) < 1e-6 * std::max(std::abs(out.in.lambda), std::abs(out.out.lambda));
  return out;
}

double LimitReport::max_rel_dev() const {
  double d = 0.0;
  for (const auto& e : entries) d = std::max(d, e.rel_dev);
  return d;
}

LimitReport mu_zero_limit_check(const std::vector<std::pair<std::string, CoupledOscillator>>& axes) {
  LimitReport rep;
  for (const auto& [name, c] : axes) {
    const ModePair mp = eigenmodes(c);
    const double ion_cf = std::sqrt(std::max(0.0, c.omega_ion * c.omega_ion - c.coupling_j));
    const double np_cf = c.omega_np;
    auto add = [&](const Mode& m, const char* kind, double cf) {
      LimitEntry e;
      e.label = fmt::format("{} {} ({})", name, &m == &mp.in ? "in" : "out", kind);
      e.numeric = std::abs(m.lambda);
      e.closed_form = cf;
      // a zero closed form (w_i^2 = j) is measured against the bare ion frequency
      e.rel_dev = std::abs(e.numeric - cf) / (cf > 0.0 ? cf : c.omega_ion);
      rep.entries.push_back(e);
    };
    add(mp.ion_mode(), "ion-like", ion_cf);
    add(mp.np_mode(), "nanoparticle-like", np_cf);
  }
  return rep;
}

}  // namespace dftrap::modes
