#include "dftrap/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <Eigen/Dense>
#include <fmt/core.h>
#include <omp.h>

#include "dftrap/constants.hpp"

namespace dftrap::equilibrium {

namespace {

// A point charge in a harmonic well. Fixed bodies contribute only through Coulomb.
struct Body {
  double m = 0.0;
  Vec3 w2 = Vec3::Zero();
  double q = 0.0;
  bool movable = true;
  Vec3 r = Vec3::Zero();
  double tol = 0.0;  // force tolerance, N
};

struct Result {
  bool converged = false;
  int iterations = 0;
  double min_curvature = 0.0;
  Eigen::VectorXd grad;
};

class Potential {
 public:
  Potential(std::vector<Body>& bodies, const Vec3& e) : b_(bodies), e_(e) {
    for (std::size_t i = 0; i < b_.size(); ++i)
      if (b_[i].movable) vars_.push_back(i);
  }

  int dim() const { return 3 * static_cast<int>(vars_.size()); }

  Eigen::VectorXd get() const {
    Eigen::VectorXd x(dim());
    for (std::size_t k = 0; k < vars_.size(); ++k) x.segment<3>(3 * k) = b_[vars_[k]].r;
    return x;
  }
  void set(const Eigen::VectorXd& x) {
    for (std::size_t k = 0; k < vars_.size(); ++k) b_[vars_[k]].r = x.segment<3>(3 * k);
  }

  double energy() const {
    double u = 0.0;
    for (std::size_t i : vars_) {
      const Body& p = b_[i];
      u += 0.5 * p.m * p.w2.dot(p.r.cwiseProduct(p.r)) - p.q * e_.dot(p.r);
    }
    for_pairs([&](std::size_t i, std::size_t j) {
      const double d = (b_[i].r - b_[j].r).norm();
      u += constants::coulomb_k * b_[i].q * b_[j].q / d;
    });
    return u;
  }

  Eigen::VectorXd gradient() const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      const Body& p = b_[vars_[k]];
      g.segment<3>(3 * k) = p.m * p.w2.cwiseProduct(p.r) - p.q * e_;
    }
    for_pairs([&](std::size_t i, std::size_t j) {
      const Vec3 d = b_[i].r - b_[j].r;
      const double n = d.norm();
      const Vec3 f = constants::coulomb_k * b_[i].q * b_[j].q / (n * n * n) * d;  // force on i
      if (int ki = slot(i); ki >= 0) g.segment<3>(3 * ki) -= f;
      if (int kj = slot(j); kj >= 0) g.segment<3>(3 * kj) += f;
    });
    return g;
  }

  Eigen::MatrixXd hessian() const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim(), dim());
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      const Body& p = b_[vars_[k]];
      h.block<3, 3>(3 * k, 3 * k) += (p.m * p.w2).asDiagonal();
    }
    for_pairs([&](std::size_t i, std::size_t j) {
      const Vec3 d = b_[i].r - b_[j].r;
      const double n = d.norm();
      const double c = constants::coulomb_k * b_[i].q * b_[j].q;
      const Eigen::Matrix3d hd =
          c * (3.0 * d * d.transpose() / std::pow(n, 5) - Eigen::Matrix3d::Identity() / (n * n * n));
      const int ki = slot(i), kj = slot(j);
      if (ki >= 0) h.block<3, 3>(3 * ki, 3 * ki) += hd;
      if (kj >= 0) h.block<3, 3>(3 * kj, 3 * kj) += hd;
      if (ki >= 0 && kj >= 0) {
        h.block<3, 3>(3 * ki, 3 * kj) -= hd;
        h.block<3, 3>(3 * kj, 3 * ki) -= hd;
      }
    });
    return h;
  }

  // Per-variable scale m w^2 (stiffness of the bare well), used to precondition.
  Eigen::VectorXd stiffness() const {
    Eigen::VectorXd s(dim());
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      const Body& p = b_[vars_[k]];
      s.segment<3>(3 * k) = p.m * p.w2;
    }
    return s;
  }

  bool within_tolerance(const Eigen::VectorXd& g) const {
    for (std::size_t k = 0; k < vars_.size(); ++k)
      if (!(g.segment<3>(3 * k).norm() < b_[vars_[k]].tol)) return false;
    return true;
  }

  double min_separation() const {
    double m = std::numeric_limits<double>::infinity();
    for_pairs([&](std::size_t i, std::size_t j) { m = std::min(m, (b_[i].r - b_[j].r).norm()); });
    return m;
  }

 private:
  template <class F>
  void for_pairs(F&& f) const {
    for (std::size_t i = 0; i < b_.size(); ++i)
      for (std::size_t j = i + 1; j < b_.size(); ++j)
        if (b_[i].q != 0.0 && b_[j].q != 0.0 && (b_[i].movable || b_[j].movable)) f(i, j);
  }
  int slot(std::size_t i) const {
    for (std::size_t k = 0; k < vars_.size(); ++k)
      if (vars_[k] == i) return static_cast<int>(k);
    return -1;
  }

  std::vector<Body>& b_;
  Vec3 e_;
  std::vector<std::size_t> vars_;
};

// Smallest eigenpair of the stiffness-scaled Hessian S^-1/2 H S^-1/2.
std::pair<double, Eigen::VectorXd> lowest_mode(const Potential& P) {
  const Eigen::VectorXd s = P.stiffness().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd hs = s.asDiagonal() * P.hessian() * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hs);
  Eigen::VectorXd v = s.asDiagonal() * es.eigenvectors().col(0);
  Eigen::Index imax;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0.0) v = -v;
  return {es.eigenvalues()[0], v.normalized()};
}

constexpr int kMaxIterations = 500;
constexpr double kMinSeparation = 1e-9;

// Damped Newton with a preconditioned-gradient fallback when H is not positive definite.
Result descend(Potential& P) {
  Result res;
  const Eigen::VectorXd stiff = P.stiffness();
  for (int it = 0; it < kMaxIterations; ++it) {
    const Eigen::VectorXd g = P.gradient();
    res.iterations = it;
    if (P.within_tolerance(g)) {
      res.converged = true;
      res.grad = g;
      return res;
    }
    const Eigen::MatrixXd H = P.hessian();
    Eigen::VectorXd step;
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() == Eigen::Success) {
      step = -llt.solve(g);
    } else {
      const Eigen::VectorXd diag = H.diagonal().cwiseAbs().cwiseMax(stiff);
      step = -g.cwiseQuotient(diag);
    }
    const Eigen::VectorXd x0 = P.get();
    const double u0 = P.energy();
    const double gnorm0 = g.norm();
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      P.set(x0 + alpha * step);
      if (P.min_separation() < kMinSeparation) continue;
      const double u1 = P.energy();
      if (!std::isfinite(u1)) continue;
      // near the minimum U changes below its rounding floor; fall back on |g|
      if (u1 < u0 || (u1 <= u0 + 1e-12 * std::abs(u0) && P.gradient().norm() < gnorm0)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      P.set(x0);
      res.grad = g;
      return res;
    }
  }
  res.grad = P.gradient();
  res.converged = P.within_tolerance(res.grad);
  return res;
}

Result minimize(Potential& P) {
  Result res = descend(P);
  if (!res.converged) return res;
  auto [lam, v] = lowest_mode(P);
  res.min_curvature = lam;
  if (lam > 0.0) return res;
  // stationary but not a minimum: leave along the soft direction once
  const Eigen::VectorXd saddle = P.get();
  const double kick = 1e-6;
  P.set(saddle + kick * v / v.cwiseAbs().maxCoeff());
  Result again = descend(P);
  if (again.converged) {
    auto [lam2, v2] = lowest_mode(P);
    again.min_curvature = lam2;
    if (lam2 > 0.0) {
      again.iterations += res.iterations;
      return again;
    }
  }
  std::string where;
  for (Eigen::Index i = 0; i < saddle.size(); ++i) where += fmt::format("{}{:.6g}", i ? ", " : "", saddle[i]);
  throw ConvergenceError(fmt::format("equilibrium: stationary point is a saddle (lowest scaled curvature {:.3g}) at [{}] m",
                                     lam, where));
}

Vec3 omega_squared(const ParticleSpec& p, const char* who) {
  if (!p.omega_sec) throw DomainError(fmt::format("equilibrium: {} needs secular frequencies", who));
  const auto& w = *p.omega_sec;
  return {w[0] * w[0], w[1] * w[1], w[2] * w[2]};
}

}  // namespace

void EquilibriumProblem::validate() const {
  ion.validate();
  if (!ion.omega_sec) throw DomainError("equilibrium: ion needs secular frequencies");
  if (np_charge != 0 && (np_charge > 0) != (ion.charge > 0))
    throw DomainError("equilibrium: nanoparticle and ion must carry like charges");
}

double default_force_tolerance(const ParticleSpec& p) {
  const auto& w = p.omega_sec.value();
  const double wmax = std::max({w[0], w[1], w[2]});
  return p.mass * wmax * wmax * kLengthTolerance;
}

EquilibriumSolution solve_ion_equilibrium(const EquilibriumProblem& p, double tol) {
  p.validate();
  std::vector<Body> bodies(2);
  Body& ion = bodies[0];
  ion.m = p.ion.mass;
  ion.w2 = omega_squared(p.ion, "ion");
  ion.q = p.ion.charge_coulomb();
  ion.r = p.initial_guess.value_or(Vec3::Zero());
  ion.tol = tol > 0.0 ? tol : default_force_tolerance(p.ion);
  Body& np = bodies[1];
  np.movable = false;
  np.q = p.np_charge * constants::elementary_charge;
  np.r = p.np_position;
  if (np.q != 0.0 && (ion.r - np.r).norm() < kMinSeparation) {
    // start on the far side of the well from the nanoparticle
    ion.r = np.r.norm() > 0.0 ? Vec3(-np.r.normalized() * 1e-6) : Vec3(0, 0, 1e-6);
  }

  Potential P(bodies, p.static_field);
  const Result r = minimize(P);
  EquilibriumSolution s;
  s.ion_position = bodies[0].r;
  s.residual_force = -r.grad.head<3>();
  s.converged = r.converged;
  s.iterations = r.iterations;
  s.min_curvature = r.min_curvature;
  if (!s.converged)
    throw ConvergenceError(fmt::format("equilibrium: no convergence after {} iterations (|F|={:.3g} N)",
                                       s.iterations, s.residual_force.norm()));
  return s;
}

std::vector<EquilibriumSolution> ion_position_curve(const std::vector<Vec3>& np_positions,
                                                    const EquilibriumProblem& tmpl, const CurveOptions& opt) {
  std::vector<EquilibriumSolution> out(np_positions.size());
  const long n = static_cast<long>(np_positions.size());
  auto solve_at = [&](long i, const std::optional<Vec3>& guess) {
    EquilibriumProblem p = tmpl;
    p.np_position = np_positions[i];
    if (guess) p.initial_guess = guess;
    try {
      return solve_ion_equilibrium(p, opt.tol);
    } catch (const std::exception& e) {
      throw BatchError(static_cast<std::size_t>(i), e.what());
    }
  };

  if (opt.warm_start) {
    std::optional<Vec3> guess = tmpl.initial_guess;
    for (long i = 0; i < n; ++i) {
      out[i] = solve_at(i, guess);
      if (i > 0 && (out[i].ion_position - out[i - 1].ion_position).norm() > opt.jump_bound)
        throw BatchError(static_cast<std::size_t>(i),
                         fmt::format("ion moved {:.3g} m from the previous point (bound {:.3g} m)",
                                     (out[i].ion_position - out[i - 1].ion_position).norm(), opt.jump_bound));
      guess = out[i].ion_position;
    }
    return out;
  }

  if (opt.exec == Execution::serial) {
    for (long i = 0; i < n; ++i) out[i] = solve_at(i, tmpl.initial_guess);
    return out;
  }
  std::vector<std::exception_ptr> errs(out.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = solve_at(i, tmpl.initial_guess);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

const char* to_string(PairKind k) {
  switch (k) {
    case PairKind::xy_pair: return "xy-pair";
    case PairKind::mixed: return "mixed";
    case PairKind::z_pair: return "z-pair";
  }
  return "?";
}

PairKind classify(const Vec3& separation, double* axial_fraction) {
  const double n = separation.norm();
  const double f = n > 0.0 ? std::abs(separation.z()) / n : 0.0;
  if (axial_fraction) *axial_fraction = f;
  if (f > 0.8) return PairKind::z_pair;
  if (f < 0.2) return PairKind::xy_pair;
  return PairKind::mixed;
}

JointSolution solve_pair(const PairConfig& cfg, const SetPoint& sp, const std::optional<Vec3>& ion_guess,
                         const std::optional<Vec3>& np_guess) {
  cfg.ion.validate();
  cfg.nanoparticle.validate();
  TrapConfig trap = cfg.trap;
  trap.v_comp = sp.v_comp;
  trap.endcap_bias = sp.endcap_bias;
  const Vec3 e = trap.static_field();

  std::vector<Body> bodies(2);
  for (int k = 0; k < 2; ++k) {
    const ParticleSpec& p = k == 0 ? cfg.ion : cfg.nanoparticle;
    Body& b = bodies[k];
    b.m = p.mass;
    b.w2 = omega_squared(p, k == 0 ? "ion" : "nanoparticle");
    b.q = p.charge_coulomb();
    b.tol = default_force_tolerance(p);
    // harmonic response to the static field as the cold start
    b.r = (b.q * e).cwiseQuotient(b.m * b.w2);
  }
  if (ion_guess) bodies[0].r = *ion_guess;
  if (np_guess) bodies[1].r = *np_guess;
  if ((bodies[0].r - bodies[1].r).norm() < 1e-6) bodies[0].r = bodies[1].r + Vec3(0, 0, 10e-6);

  Potential P(bodies, e);
  const Result r = minimize(P);
  JointSolution s;
  s.setpoint = sp;
  s.ion_position = bodies[0].r;
  s.np_position = bodies[1].r;
  s.ion_residual = -r.grad.segment<3>(0);
  s.np_residual = -r.grad.segment<3>(3);
  s.converged = r.converged;
  s.min_curvature = r.min_curvature;
  s.kind = classify(s.ion_position - s.np_position, &s.axial_fraction);
  if (!s.converged)
    throw ConvergenceError(fmt::format("pair equilibrium: no convergence after {} iterations", r.iterations));
  return s;
}

std::vector<JointSolution> run_schedule(const VoltageSchedule& sched, const PairConfig& cfg) {
  if (sched.empty()) throw DomainError("schedule: no set-points");
  std::vector<JointSolution> out;
  std::optional<Vec3> ion_guess = cfg.ion_guess, np_guess = cfg.np_guess;
  for (std::size_t k = 0; k < sched.size(); ++k) {
    try {
      out.push_back(solve_pair(cfg, sched[k], ion_guess, np_guess));
    } catch (const std::exception& e) {
      throw ScheduleError(k, e.what(), out);
    }
    ion_guess = out.back().ion_position;
    np_guess = out.back().np_position;
  }
  return out;
}

}  // namespace dftrap::equilibrium
