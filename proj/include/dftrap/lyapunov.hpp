#pragma once

#include <Eigen/Core>

namespace dftrap::lyapunov {

/// Solves A S + S A^T + D = 0 for symmetric S by vectorising the n(n+1)/2 free
/// entries and running a full-pivot LU. Throws ConvergenceError when A is clearly
/// unstable or the system is singular.
Eigen::MatrixXd solve_continuous(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D);

/// Smallest eigenvalue of S after scaling to unit diagonal (correlation form).
double min_scaled_eigenvalue(const Eigen::MatrixXd& S);

}  // namespace dftrap::lyapunov
