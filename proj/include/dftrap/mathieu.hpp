#pragma once

// Floquet analysis of x'' + (a + 2q cos 2t) x = 0 over one period t in [0, pi].

#include <vector>

#include "dftrap/parallel.hpp"

namespace dftrap::mathieu {

inline constexpr int kDefaultSteps = 4096;

struct FloquetResult {
  double trace = 0.0;
  double det = 1.0;        // Wronskian of the monodromy, 1 in exact arithmetic
  bool stable = false;     // |trace| <= 2
  double exponent = 0.0;   // acosh(|trace| / 2) per period, 0 when stable
};

/// Fixed-step RK4 monodromy. Deterministic for a fixed step count.
FloquetResult monodromy(double a, double q, int steps = kDefaultSteps);

/// monodromy() plus a step-doubling check; throws ConvergenceError when the
/// trace moves by more than tol.
FloquetResult monodromy_checked(double a, double q, int steps = kDefaultSteps, double tol = 1e-8);

bool floquet_stable(double a, double q, int steps = kDefaultSteps);

/// Both transverse axes of the quadrupole are bounded: x sees (a, q), y sees (-a, q).
bool co_stable(double a, double q, int steps = kDefaultSteps);

enum class Side { lower, upper };

/// Edge of the first stability region at fixed q by bisection on a inside [-1, 1].
/// The lower edge is negative (a0 branch), the upper edge is the b1 branch.
/// Returns the stable end of the final bracket.
double boundary_a_for_q(double q, Side side, double tol = 1e-7, int steps = kDefaultSteps);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct StabilityPoint {
  double q = 0.0;
  double a = 0.0;
  bool stable = false;
  double trace = 0.0;
};

struct StabilityDiagram {
  std::vector<double> q_grid;
  std::vector<double> a_grid;
  std::vector<double> a_boundary_low;
  std::vector<double> a_boundary_high;
  std::vector<StabilityPoint> points;  // row-major, q index outer
};

struct ScanOptions {
  int steps = kDefaultSteps;
  double boundary_tol = 1e-7;
  Execution exec = Execution::parallel;
};

/// Grid of verdicts plus the traced first-region edges at every q_grid entry.
/// Only the first region is mapped, so q must stay below ~0.908.
StabilityDiagram stability_scan(Range q, Range a, int nq, int na, const ScanOptions& opt = {});

/// Boundary trace only (no grid), used for the 200-point curve.
std::vector<double> boundary_trace(const std::vector<double>& q_grid, Side side,
                                   const ScanOptions& opt = {});

}  // namespace dftrap::mathieu
