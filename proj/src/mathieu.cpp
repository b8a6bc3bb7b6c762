#include "dftrap/mathieu.hpp"

#include <array>
#include <cmath>

#include <fmt/core.h>
#include <omp.h>

#include "dftrap/constants.hpp"
#include "dftrap/errors.hpp"

namespace dftrap::mathieu {

namespace {

using Mat2 = std::array<double, 4>;  // column-major fundamental matrix [x1 x2; v1 v2]

inline double coeff(double a, double q, double t) { return a + 2.0 * q * std::cos(2.0 * t); }

}  // namespace

FloquetResult monodromy(double a, double q, int steps) {
  if (steps < 8) throw DomainError("monodromy: need at least 8 steps");
  const double h = constants::pi / steps;
  // two columns integrated together: (x, v) from (1, 0) and from (0, 1)
  double x1 = 1.0, v1 = 0.0, x2 = 0.0, v2 = 1.0;
  for (int n = 0; n < steps; ++n) {
    const double t = n * h;
    const double c0 = coeff(a, q, t);
    const double ch = coeff(a, q, t + 0.5 * h);
    const double c1 = coeff(a, q, t + h);
    auto step = [&](double& x, double& v) {
      const double k1x = v, k1v = -c0 * x;
      const double k2x = v + 0.5 * h * k1v, k2v = -ch * (x + 0.5 * h * k1x);
      const double k3x = v + 0.5 * h * k2v, k3v = -ch * (x + 0.5 * h * k2x);
      const double k4x = v + h * k3v, k4v = -c1 * (x + h * k3x);
      x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    };
    step(x1, v1);
    step(x2, v2);
  }
  FloquetResult r;
  r.trace = x1 + v2;
  r.det = x1 * v2 - x2 * v1;
  r.stable = std::abs(r.trace) <= 2.0;
  r.exponent = r.stable ? 0.0 : std::acosh(0.5 * std::abs(r.trace));
  return r;
}

FloquetResult monodromy_checked(double a, double q, int steps, double tol) {
  const FloquetResult coarse = monodromy(a, q, steps);
  const FloquetResult fine = monodromy(a, q, 2 * steps);
  if (std::abs(fine.trace - coarse.trace) > tol)
    throw ConvergenceError(fmt::format("monodromy at (a={}, q={}): trace moved by {:.3g} on step doubling",
                                       a, q, std::abs(fine.trace - coarse.trace)));
  return coarse;
}

bool floquet_stable(double a, double q, int steps) { return monodromy(a, q, steps).stable; }

bool co_stable(double a, double q, int steps) {
  return floquet_stable(a, q, steps) && floquet_stable(-a, q, steps);
}

double boundary_a_for_q(double q, Side side, double tol, int steps) {
  if (!(tol > 0.0)) throw DomainError("boundary_a_for_q: tol must be positive");
  q = std::abs(q);
  // q = 0: region is [0, 1] exactly (trace = 2 at a = 0, -2 at a = 1)
  if (q == 0.0) return side == Side::lower ? 0.0 : 1.0;
  double stable_end = 0.0;
  double unstable_end = side == Side::lower ? -1.0 : 1.0;
  if (!floquet_stable(stable_end, q, steps) || floquet_stable(unstable_end, q, steps))
    throw BracketError(fmt::format("no stability change for q={} in a-window [-1, 1]", q));
  while (std::abs(unstable_end - stable_end) > tol) {
    const double mid = 0.5 * (stable_end + unstable_end);
    (floquet_stable(mid, q, steps) ? stable_end : unstable_end) = mid;
  }
  return stable_end;
}

std::vector<double> boundary_trace(const std::vector<double>& q_grid, Side side, const ScanOptions& opt) {
  const long n = static_cast<long>(q_grid.size());
  std::vector<double> out(q_grid.size());
  if (opt.exec == Execution::serial) {
    for (long i = 0; i < n; ++i) out[i] = boundary_a_for_q(q_grid[i], side, opt.boundary_tol, opt.steps);
    return out;
  }
  // exceptions may not cross the parallel region; capture the first by index
  std::vector<std::exception_ptr> errs(q_grid.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = boundary_a_for_q(q_grid[i], side, opt.boundary_tol, opt.steps);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace {

std::vector<double> linspace(Range r, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? r.lo : r.lo + (r.hi - r.lo) * i / (n - 1);
  return g;
}

}  // namespace

StabilityDiagram stability_scan(Range q, Range a, int nq, int na, const ScanOptions& opt) {
  if (nq < 2 || na < 2) throw DomainError("stability_scan: resolution must be >= 2 per axis");
  if (q.hi < q.lo || a.hi <= a.lo) throw DomainError("stability_scan: degenerate range");
  StabilityDiagram d;
  d.q_grid = linspace(q, nq);
  d.a_grid = linspace(a, na);
  d.points.resize(static_cast<std::size_t>(nq) * na);

  const long total = static_cast<long>(d.points.size());
  auto eval = [&](long k) {
    const double qq = d.q_grid[k / na], aa = d.a_grid[k % na];
    const FloquetResult f = monodromy(aa, qq, opt.steps);
    d.points[k] = {qq, aa, f.stable, f.trace};
  };
  if (opt.exec == Execution::serial) {
    for (long k = 0; k < total; ++k) eval(k);
  } else {
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (long k = 0; k < total; ++k) eval(k);
  }
  d.a_boundary_low = boundary_trace(d.q_grid, Side::lower, opt);
  d.a_boundary_high = boundary_trace(d.q_grid, Side::upper, opt);
  return d;
}

}  // namespace dftrap::mathieu
