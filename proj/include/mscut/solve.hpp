#pragma once

#include "mscut/assembly.hpp"

#include <optional>
#include <string>

namespace mscut {

struct SolveOptions {
  /// Sparse Cholesky up to this many unknowns, diagonally preconditioned
  /// conjugate gradients above.
  int direct_limit = 50000;
  double cg_tolerance = 1e-10;
};

struct SolveReport {
  Eigen::VectorXd solution;
  std::string method;
  int iterations = 0;
  /// ||b - A x|| / ||b|| (absolute when b = 0).
  double residual = 0.0;
  std::optional<double> condition;
};

SolveReport solve_spd(const SparseMatrix &a, const Eigen::VectorXd &b,
                      const SolveOptions &options = {});

struct ConditionOptions {
  /// Dense symmetric eigensolve up to this size.
  int dense_limit = 2000;
  /// Lanczos stops when the Ritz residual is below tolerance * |theta|,
  /// which bounds the relative eigenvalue error by the same amount.
  double tolerance = 1e-8;
  int max_steps = 300;
};

/// Spectral condition number lambda_max / lambda_min of an SPD matrix.
/// Large matrices use Lanczos with full reorthogonalisation on A for the top
/// of the spectrum and on A^{-1}, applied through a sparse Cholesky factor,
/// for the bottom.
double cond_estimate(const SparseMatrix &a, const ConditionOptions &options = {});

struct ExtremeEigenvalues {
  double min = 0.0;
  double max = 0.0;
};

ExtremeEigenvalues extreme_eigenvalues(const SparseMatrix &a,
                                       const ConditionOptions &options = {});

} // namespace mscut
