#include "dftrap/dynamics.hpp"

#include <cmath>
#include <complex>
#include <exception>

#include <fmt/core.h>
#include <omp.h>

#include "dftrap/constants.hpp"
#include "dftrap/errors.hpp"

namespace dftrap::dynamics {

void FieldModel::validate() const {
  trap.validate();
  if (particles.empty() || particles.size() > 2)
    throw DomainError("field model: need one or two particles");
  for (const auto& p : particles) p.validate();
  if (axial_rf_gain < 0.0) throw DomainError("field model: axial_rf_gain must be >= 0");
  if (axial_from_secular)
    for (const auto& p : particles)
      if (!p.omega_sec) throw DomainError("field model: axial_from_secular needs omega_sec on every particle");
}

double FieldModel::axial_omega(std::size_t i) const {
  const ParticleSpec& p = particles[i];
  if (axial_from_secular && p.omega_sec) return (*p.omega_sec)[2];
  return endcap_axial_frequency(trap, p);
}

double FieldModel::quad_voltage(double t) const {
  return trap.v_fast * std::cos(trap.omega_fast * t) +
         trap.v_slow * std::cos(trap.omega_slow * t + trap.slow_phase) + trap.v_dc_quad;
}

namespace {

// Per-particle constants hoisted out of the step loop.
struct Prepared {
  std::size_t n = 1;
  std::array<double, 2> inv_m{};
  std::array<double, 2> charge{};
  std::array<double, 2> wz2{};
  double quad_scale = 0.0;   // kappa / r0^2
  double leak_scale = 0.0;   // axial_rf_gain * kappa / r0^2
  Vec3 e_static = Vec3::Zero();
  double coulomb = 0.0;      // k Q1 Q2
  const FieldModel* field = nullptr;
};

Prepared prepare(const FieldModel& f) {
  Prepared p;
  p.field = &f;
  p.n = f.count();
  for (std::size_t i = 0; i < p.n; ++i) {
    p.inv_m[i] = 1.0 / f.particles[i].mass;
    p.charge[i] = f.particles[i].charge_coulomb();
    const double w = f.axial_omega(i);
    p.wz2[i] = w * w;
  }
  p.quad_scale = f.trap.kappa_geo / (f.trap.r0 * f.trap.r0);
  p.leak_scale = f.axial_rf_gain * p.quad_scale;
  p.e_static = f.trap.static_field();
  if (p.n == 2 && f.include_coulomb) p.coulomb = constants::coulomb_k * p.charge[0] * p.charge[1];
  return p;
}

void accelerations(const Prepared& P, const std::array<Vec3, 2>& r, double t, std::array<Vec3, 2>& acc) {
  const TrapConfig& trap = P.field->trap;
  const double vq = P.field->quad_voltage(t);
  const double vs = P.leak_scale != 0.0 ? trap.v_slow * std::cos(trap.omega_slow * t + trap.slow_phase) : 0.0;
  for (std::size_t i = 0; i < P.n; ++i) {
    const double Q = P.charge[i];
    const double kq = Q * vq * P.quad_scale;
    const double m = 1.0 / P.inv_m[i];
    const double w2 = P.wz2[i];
    Vec3 f;
    f.x() = -kq * r[i].x() + 0.5 * m * w2 * r[i].x();
    f.y() = kq * r[i].y() + 0.5 * m * w2 * r[i].y();
    f.z() = -m * w2 * r[i].z() - Q * vs * P.leak_scale * r[i].z();
    f += Q * P.e_static;
    acc[i] = f * P.inv_m[i];
  }
  if (P.coulomb != 0.0) {
    const Vec3 d = r[0] - r[1];
    const double dist = d.norm();
    if (dist < kHardCore)
      throw SingularityError(fmt::format("particles {:.3g} m apart, inside the hard core", dist));
    const Vec3 f01 = (P.coulomb / (dist * dist * dist)) * d;
    acc[0] += f01 * P.inv_m[0];
    acc[1] -= f01 * P.inv_m[1];
  }
}

}  // namespace

Forces force(const TwoParticleState& s, const FieldModel& field, double t) {
  Prepared P = prepare(field);
  const double kqq = P.coulomb;
  P.coulomb = 0.0;
  std::array<Vec3, 2> acc{Vec3::Zero(), Vec3::Zero()};
  accelerations(P, s.r, t, acc);
  Forces out;
  for (std::size_t i = 0; i < P.n; ++i) out.f[i] = acc[i] / P.inv_m[i];
  if (kqq != 0.0) {
    const Vec3 d = s.r[0] - s.r[1];
    const double dist = d.norm();
    if (dist < kHardCore)
      throw SingularityError(fmt::format("particles {:.3g} m apart, inside the hard core", dist));
    // one pair term, applied with opposite signs: third law holds bit for bit
    const Vec3 f01 = (kqq / (dist * dist * dist)) * d;
    out.f[0] += f01;
    out.f[1] -= f01;
  }
  return out;
}

double total_energy(const TwoParticleState& s, const FieldModel& field) {
  const Prepared P = prepare(field);
  const double vq = field.trap.v_dc_quad;
  double e = 0.0;
  for (std::size_t i = 0; i < P.n; ++i) {
    const double m = field.particles[i].mass;
    const Vec3& r = s.r[i];
    e += 0.5 * m * s.v[i].squaredNorm();
    e += 0.5 * m * P.wz2[i] * (r.z() * r.z() - 0.5 * (r.x() * r.x() + r.y() * r.y()));
    e += 0.5 * P.charge[i] * vq * P.quad_scale * (r.x() * r.x() - r.y() * r.y());
    e -= P.charge[i] * P.e_static.dot(r);
  }
  if (P.coulomb != 0.0) e += P.coulomb / (s.r[0] - s.r[1]).norm();
  return e;
}

namespace {

void check_step(const FieldModel& field, double dt) {
  if (!(dt > 0.0)) throw StepSizeError("integrate: dt must be positive");
  if (field.trap.v_fast != 0.0) {
    const double t_fast = constants::two_pi / field.trap.omega_fast;
    if (dt > t_fast / 50.0)
      throw StepSizeError(fmt::format("integrate: dt={:.3g} s exceeds T_fast/50={:.3g} s", dt, t_fast / 50.0));
  }
}

struct Stepper {
  Prepared P;
  std::array<Vec3, 2> k1r, k1v, k2r, k2v, k3r, k3v, k4r, k4v, tmp;

  explicit Stepper(const FieldModel& f) : P(prepare(f)) {}

  void step(TwoParticleState& s, double h) {
    const std::size_t n = P.n;
    for (std::size_t i = 0; i < n; ++i) k1r[i] = s.v[i];
    accelerations(P, s.r, s.t, k1v);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s.r[i] + 0.5 * h * k1r[i];
    for (std::size_t i = 0; i < n; ++i) k2r[i] = s.v[i] + 0.5 * h * k1v[i];
    accelerations(P, tmp, s.t + 0.5 * h, k2v);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s.r[i] + 0.5 * h * k2r[i];
    for (std::size_t i = 0; i < n; ++i) k3r[i] = s.v[i] + 0.5 * h * k2v[i];
    accelerations(P, tmp, s.t + 0.5 * h, k3v);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s.r[i] + h * k3r[i];
    for (std::size_t i = 0; i < n; ++i) k4r[i] = s.v[i] + h * k3v[i];
    accelerations(P, tmp, s.t + h, k4v);
    for (std::size_t i = 0; i < n; ++i) {
      s.r[i] += h / 6.0 * (k1r[i] + 2.0 * k2r[i] + 2.0 * k3r[i] + k4r[i]);
      s.v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
    }
  }

  bool outside(const TwoParticleState& s, double radius) const {
    for (std::size_t i = 0; i < P.n; ++i)
      if (!(s.r[i].norm() <= radius)) return true;  // NaN counts as escaped
    return false;
  }
};

}  // namespace

TrajectoryRecord integrate(const TwoParticleState& initial, const FieldModel& field, double dt,
                           double t_end, int sample_every, const IntegrateOptions& opt) {
  field.validate();
  check_step(field, dt);
  if (sample_every < 1) throw DomainError("integrate: sample_every must be >= 1");
  const double radius = opt.escape_radius > 0.0 ? opt.escape_radius : 10.0 * field.trap.r0;
  const long nsteps = std::lround(std::ceil((t_end - initial.t) / dt - 1e-9));

  Stepper st(field);
  TrajectoryRecord rec;
  rec.particle_count = field.count();
  TwoParticleState s = initial;
  const double t0 = initial.t;
  auto record = [&] {
    if (s.t >= opt.record_from) {
      rec.times.push_back(s.t);
      rec.samples.push_back(s);
    }
  };
  record();
  for (long n = 1; n <= nsteps; ++n) {
    st.step(s, dt);
    s.t = t0 + n * dt;  // no accumulated drift in the clock
    if (st.outside(s, radius)) {
      rec.escaped = true;
      rec.escape_time = s.t;
      record();
      break;
    }
    if (n % sample_every == 0) record();
  }
  return rec;
}

bool escapes(const TwoParticleState& initial, const FieldModel& field, double dt, double t_end,
             double escape_radius) {
  field.validate();
  check_step(field, dt);
  const double radius = escape_radius > 0.0 ? escape_radius : 10.0 * field.trap.r0;
  const long nsteps = std::lround(std::ceil((t_end - initial.t) / dt - 1e-9));
  Stepper st(field);
  TwoParticleState s = initial;
  for (long n = 1; n <= nsteps; ++n) {
    st.step(s, dt);
    s.t = initial.t + n * dt;
    if (st.outside(s, radius)) return true;
  }
  return false;
}

double slow_micromotion_amplitude(const TrajectoryRecord& rec, const FieldModel& field, Axis axis,
                                  std::size_t particle) {
  if (particle >= rec.particle_count) throw DomainError("micromotion: particle index out of range");
  if (rec.times.size() < 3) throw InsufficientDataError("micromotion: record has fewer than 3 samples");
  const double w = field.trap.omega_slow;
  const double period = constants::two_pi / w;
  const double t_last = rec.times.back();
  const double span = t_last - rec.times.front();
  const long periods = static_cast<long>(std::floor(span / period + 1e-9));
  if (periods < 10)
    throw InsufficientDataError(fmt::format("micromotion: record spans {} slow periods, need 10", periods));

  // window = last `periods` whole periods; samples are uniform, so drop the
  // closing sample to avoid counting the endpoint twice
  const double t_start = t_last - periods * period;
  std::complex<double> acc{0.0, 0.0};
  long count = 0;
  const int ax = index(axis);
  for (std::size_t k = 0; k + 1 < rec.times.size(); ++k) {
    const double t = rec.times[k];
    if (t < t_start - 1e-12 * period) continue;
    const double x = rec.samples[k].r[particle][ax];
    acc += x * std::polar(1.0, -w * t);
    ++count;
  }
  if (count < 4) throw InsufficientDataError("micromotion: too few samples inside the analysis window");
  return 2.0 * std::abs(acc) / count;
}

double escape_threshold(const FieldModel& field_template, double v_slow_lo, double v_slow_hi,
                        const EscapeOptions& opt) {
  field_template.validate();
  if (!(v_slow_hi > v_slow_lo) || v_slow_lo < 0.0) throw DomainError("escape_threshold: bad voltage range");
  if (!(opt.tol > 0.0)) throw DomainError("escape_threshold: tol must be positive");
  const double dt = constants::two_pi / field_template.trap.omega_fast / opt.steps_per_fast_period;
  const double horizon = opt.horizon_slow_periods * constants::two_pi / field_template.trap.omega_slow;

  TwoParticleState init;
  init.r[0] = opt.initial_offset;
  auto probe = [&](double v) {
    FieldModel f = field_template;
    f.trap.v_slow = v;
    return escapes(init, f, dt, horizon);
  };
  auto probes = [&](const std::array<double, 3>& vs) {
    std::array<char, 3> out{};
    std::array<std::exception_ptr, 3> errs{};
    if (opt.exec == Execution::serial) {
      for (int i = 0; i < 3; ++i) out[i] = probe(vs[i]);
      return out;
    }
#pragma omp parallel for schedule(static, 1) num_threads(std::min(3, worker_count()))
    for (int i = 0; i < 3; ++i) {
      try {
        out[i] = probe(vs[i]);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
    return out;
  };

  double lo = v_slow_lo, hi = v_slow_hi;
  {
    const auto ends = probes({lo, hi, hi});
    if (ends[0] || !ends[1])
      throw BracketError(fmt::format("escape_threshold: [{}, {}] V does not bracket the escape onset", lo, hi));
  }
  while (hi - lo > opt.tol) {
    const double d = 0.25 * (hi - lo);
    const std::array<double, 3> vs{lo + d, lo + 2.0 * d, lo + 3.0 * d};
    const auto esc = probes(vs);
    // first escaping probe closes the bracket from above
    int k = 0;
    while (k < 3 && !esc[k]) ++k;
    const double new_lo = k == 0 ? lo : vs[k - 1];
    const double new_hi = k == 3 ? hi : vs[k];
    lo = new_lo;
    hi = new_hi;
  }
  return hi;
}

}  // namespace dftrap::dynamics
