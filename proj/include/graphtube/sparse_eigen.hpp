#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace graphtube {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct EigenOptions {
  /// Shift below the wanted eigenvalues; NaN picks one by inertia bisection.
  double shift = std::numeric_limits<double>::quiet_NaN();
  /// Known lower bound of the spectrum (speeds up the automatic shift).
  double lower_bound = std::numeric_limits<double>::quiet_NaN();
  double tol = 1e-8;
  int max_iterations = 300;
  int extra_vectors = 6;
  std::uint64_t seed = 0x5eed5eedULL;
};

struct EigenPairs {
  std::vector<double> values;
  Eigen::MatrixXd vectors; ///< M-orthonormal columns
  std::vector<double> residuals;
  double shift = 0.0;
  int iterations = 0;
  int reshifts = 0;
};

/// Number of eigenvalues of A x = λ M x below sigma (M positive definite).
Eigen::Index count_eigenvalues_below(const SparseMatrix& A, const SparseMatrix& M, double sigma);

/// Lowest `count` eigenpairs of A x = λ M x, A symmetric, M symmetric
/// positive definite. Block shift-invert iteration with Rayleigh–Ritz on A;
/// residual ‖Ax − λMx‖ measured in the lumped inverse-mass norm and required
/// below tol·max(1, |λ|).
EigenPairs shift_invert_eigs(const SparseMatrix& A, const SparseMatrix& M, int count,
                             const EigenOptions& options = {});

} // namespace graphtube
