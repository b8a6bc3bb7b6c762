#include "dftrap/lyapunov.hpp"

#include <limits>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "dftrap/errors.hpp"

namespace dftrap::lyapunov {

Eigen::MatrixXd solve_continuous(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || D.rows() != n || D.cols() != n) throw DomainError("lyapunov: shape mismatch");
  // the dense eigenvalues carry an absolute error ~ eps |A|, so only clear
  // instabilities are caught here; callers with stiff A check refined spectra
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  const double floor = 1e-12 * A.norm();
  for (Eigen::Index i = 0; i < n; ++i)
    if (es.eigenvalues()[i].real() > floor)
      throw ConvergenceError(fmt::format("lyapunov: drift has an eigenvalue with Re = {:.3g} > 0",
                                         es.eigenvalues()[i].real()));

  // unknown k <-> (i, j) with i <= j
  const Eigen::Index m = n * (n + 1) / 2;
  Eigen::MatrixXi slot(n, n);
  for (Eigen::Index i = 0, k = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j, ++k) slot(i, j) = slot(j, i) = static_cast<int>(k);

  // (A S + S A^T)_ij = sum_k A_ik S_kj + S_ik A_jk
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      const int row = slot(i, j);
      for (Eigen::Index k = 0; k < n; ++k) {
        L(row, slot(k, j)) += A(i, k);
        L(row, slot(i, k)) += A(j, k);
      }
      rhs(row) = -D(i, j);
    }
  // entries span ~20 decades here: equilibrate rows then columns, and keep every
  // pivot (the default rank threshold would zero the small-scale unknowns)
  Eigen::VectorXd rs(m), cs(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const double mx = L.row(r).cwiseAbs().maxCoeff();
    rs(r) = mx > 0.0 ? 1.0 / mx : 1.0;
  }
  L = rs.asDiagonal() * L;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double mx = L.col(k).cwiseAbs().maxCoeff();
    cs(k) = mx > 0.0 ? 1.0 / mx : 1.0;
  }
  L = L * cs.asDiagonal();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
  lu.setThreshold(std::numeric_limits<double>::min());
  const Eigen::VectorXd s = cs.asDiagonal() * lu.solve(rs.asDiagonal() * rhs);
  if (!s.allFinite()) throw ConvergenceError("lyapunov: singular vectorised operator");

  Eigen::MatrixXd S(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) S(i, j) = s(slot(i, j));
  return S;
}

double min_scaled_eigenvalue(const Eigen::MatrixXd& S) {
  Eigen::VectorXd d = S.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = d(i) > 0.0 ? 1.0 / std::sqrt(d(i)) : 1.0;
  const Eigen::MatrixXd C = d.asDiagonal() * S * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (C + C.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace dftrap::lyapunov
