#include "mscut/solve.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <cmath>

namespace mscut {

namespace {

using Cholesky = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower,
                                      Eigen::AMDOrdering<int>>;

double relative_residual(const SparseMatrix &a, const Eigen::VectorXd &x,
                         const Eigen::VectorXd &b) {
  const double r = (b - a * x).norm();
  const double nb = b.norm();
  return nb > 0.0 ? r / nb : r;
}

Eigen::VectorXd start_vector(int n) {
  // fixed, non-symmetric pattern so the start is not orthogonal to the
  // extreme eigenvectors of structured operators
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v[i] = 1.0 + 0.5 * std::sin(1.3 * i + 0.7) + 0.25 * std::cos(0.37 * i * i);
  return v.normalized();
}

/// Largest eigenvalue of a symmetric operator by Lanczos with full
/// reorthogonalisation. Stops once the Ritz residual drops below
/// tol * |theta|, which bounds the eigenvalue error by the same amount.
template <class Apply>
double lanczos_largest(Apply &&apply, int n, const ConditionOptions &options) {
  const int max_steps = std::min(options.max_steps, n);
  Eigen::MatrixXd basis(n, max_steps);
  std::vector<double> alpha, beta;
  basis.col(0) = start_vector(n);
  double theta = 0.0;
  for (int j = 0; j < max_steps; ++j) {
    Eigen::VectorXd w = apply(basis.col(j));
    const double a = basis.col(j).dot(w);
    alpha.push_back(a);
    // two passes of classical Gram-Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd h = basis.leftCols(j + 1).transpose() * w;
      w.noalias() -= basis.leftCols(j + 1) * h;
    }
    const double b = w.norm();

    const int m = j + 1;
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub(std::max(m - 1, 0));
    for (int k = 0; k + 1 < m; ++k)
      sub[k] = beta[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    theta = tri.eigenvalues()[m - 1];
    const double residual = b * std::abs(tri.eigenvectors()(m - 1, m - 1));
    if (residual <= options.tolerance * std::abs(theta) || b == 0.0 ||
        j + 1 == max_steps)
      break;
    beta.push_back(b);
    basis.col(j + 1) = w / b;
  }
  return theta;
}

} // namespace

SolveReport solve_spd(const SparseMatrix &a, const Eigen::VectorXd &b,
                      const SolveOptions &options) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || b.size() != n)
    throw solver_error("system dimensions do not match");
  SolveReport report;
  if (n == 0) {
    report.method = "empty";
    return report;
  }
  if (n <= options.direct_limit) {
    Cholesky llt(a);
    if (llt.info() != Eigen::Success)
      throw solver_error("matrix is not positive definite (Cholesky failed)");
    report.solution = llt.solve(b);
    report.method = "cholesky";
    report.iterations = 1;
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(options.cg_tolerance);
    cg.setMaxIterations(20 * n);
    cg.compute(a);
    report.solution = cg.solve(b);
    report.method = "pcg";
    report.iterations = static_cast<int>(cg.iterations());
    if (cg.info() != Eigen::Success)
      throw solver_error("conjugate gradients did not converge in " +
                         std::to_string(20 * n) + " iterations");
  }
  report.residual = relative_residual(a, report.solution, b);
  if (!std::isfinite(report.residual))
    throw solver_error("non-finite residual");
  return report;
}

ExtremeEigenvalues extreme_eigenvalues(const SparseMatrix &a,
                                       const ConditionOptions &options) {
  const int n = static_cast<int>(a.rows());
  if (n == 0 || a.cols() != n)
    throw solver_error("condition estimate needs a non-empty square matrix");
  ExtremeEigenvalues out;
  if (n <= options.dense_limit) {
    const Eigen::MatrixXd dense(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense,
                                                       Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
      throw solver_error("dense eigensolver failed");
    out.min = eig.eigenvalues()[0];
    out.max = eig.eigenvalues()[n - 1];
    if (!(out.min > 0.0))
      throw solver_error("matrix is not positive definite (lambda_min = " +
                         std::to_string(out.min) + ")");
    return out;
  }
  Cholesky llt(a);
  if (llt.info() != Eigen::Success)
    throw solver_error("matrix is not positive definite (Cholesky failed)");
  out.max = lanczos_largest(
      [&](const Eigen::VectorXd &v) -> Eigen::VectorXd { return a * v; }, n,
      options);
  const double inv = lanczos_largest(
      [&](const Eigen::VectorXd &v) -> Eigen::VectorXd { return llt.solve(v); },
      n, options);
  out.min = 1.0 / inv;
  return out;
}

double cond_estimate(const SparseMatrix &a, const ConditionOptions &options) {
  const ExtremeEigenvalues ev = extreme_eigenvalues(a, options);
  return ev.max / ev.min;
}

} // namespace mscut
