#include "graphtube/sparse_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "graphtube/error.hpp"

namespace graphtube {

namespace {

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

bool factor_ok(const Ldlt& f) {
  if (f.info() != Eigen::Success) return false;
  const auto& d = f.vectorD();
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d(i) == 0.0 || !std::isfinite(d(i))) return false;
  return true;
}

Eigen::Index negative_pivots(const Ldlt& f) {
  const auto& d = f.vectorD();
  Eigen::Index neg = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d(i) < 0.0) ++neg;
  return neg;
}

// M-orthonormalise the columns of V (two passes of classical Gram–Schmidt),
// dropping columns that become numerically dependent.
Eigen::MatrixXd m_orthonormalize(const Eigen::MatrixXd& V, const SparseMatrix& M) {
  Eigen::MatrixXd Q(V.rows(), V.cols());
  Eigen::MatrixXd MQ(V.rows(), V.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    Eigen::VectorXd v = V.col(j);
    const double before = std::sqrt(std::max(0.0, v.dot(M * v)));
    if (!(before > 0.0)) continue;
    double after = before;
    Eigen::VectorXd mv = M * v;
    for (int pass = 0; pass < 3 && kept > 0; ++pass) {
      const double prev = after;
      const Eigen::VectorXd c = MQ.leftCols(kept).transpose() * v;
      v -= Q.leftCols(kept) * c;
      mv = M * v;
      after = std::sqrt(std::max(0.0, v.dot(mv)));
      if (after > 0.5 * prev) break;
    }
    if (!(after > 1e-8 * before)) continue;
    Q.col(kept) = v / after;
    MQ.col(kept) = mv / after;
    ++kept;
  }
  return Q.leftCols(kept);
}

} // namespace

Eigen::Index count_eigenvalues_below(const SparseMatrix& A, const SparseMatrix& M, double sigma) {
  Ldlt f(SparseMatrix(A - sigma * M));
  if (f.info() != Eigen::Success) throw EigenError("inertia count: LDLT factorization failed");
  return negative_pivots(f);
}

EigenPairs shift_invert_eigs(const SparseMatrix& A, const SparseMatrix& M, int count, const EigenOptions& opt) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || M.rows() != n || M.cols() != n) throw InvalidParameter("eigensolver: size mismatch");
  if (count < 1 || count > n) throw InvalidParameter("eigensolver: count must lie in [1, dim]");

  auto ldlt = std::make_unique<Ldlt>();
  ldlt->analyzePattern(SparseMatrix(A + M));
  auto factorize = [&](double s) {
    ldlt->factorize(SparseMatrix(A - s * M));
    return factor_ok(*ldlt);
  };
  auto inertia = [&](double s) -> Eigen::Index {
    if (!factorize(s)) return -1;
    return negative_pivots(*ldlt);
  };

  EigenPairs out;
  double sigma = opt.shift;
  if (std::isnan(sigma)) {
    double lo = std::isfinite(opt.lower_bound) ? opt.lower_bound : -1.0;
    Eigen::Index c = inertia(lo);
    for (int guard = 0; c != 0 && guard < 200; ++guard) {
      lo = lo - std::max(1.0, 2.0 * std::abs(lo));
      c = inertia(lo);
    }
    if (c != 0) throw EigenError("eigensolver: no shift below the spectrum found");
    double step = std::max(1.0, 0.5 * std::abs(lo));
    double hi = lo + step;
    for (int guard = 0; guard < 200; ++guard) {
      const Eigen::Index ch = inertia(hi);
      if (ch >= 1) break;
      if (ch == 0) lo = hi;
      step *= 2.0;
      hi = lo + step;
    }
    for (int it = 0; it < 12; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Eigen::Index cm = inertia(mid);
      if (cm == 0) lo = mid;
      else hi = mid;
    }
    // keep a margin below λ₁ so the lowest mode does not swamp the block
    sigma = lo - std::max(1.0, 0.1 * std::abs(lo));
  }

  if (!factorize(sigma)) {
    sigma -= std::max(1e-3 * std::abs(sigma), 1e-6);
    ++out.reshifts;
    if (!factorize(sigma)) {
      std::ostringstream os;
      os << "eigensolver: factorization of A - sigma M failed at sigma = " << sigma << " after one reshift";
      throw EigenError(os.str());
    }
  }
  out.shift = sigma;

  Eigen::VectorXd lumped = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < M.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(M, k); it; ++it) lumped(it.row()) += it.value();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(lumped(i) > 0.0)) lumped(i) = 1.0;

  const Eigen::Index block = std::min<Eigen::Index>(n, count + opt.extra_vectors);
  Eigen::MatrixXd Y(n, block);
  std::mt19937_64 rng(opt.seed);
  Y.col(0).setOnes();
  for (Eigen::Index j = 1; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      Y(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  Y = m_orthonormalize(Y, M);

  auto solve = [&](const Eigen::MatrixXd& X) { return Eigen::MatrixXd(ldlt->solve(X)); };

  // Rayleigh–Ritz on span(S); keeps the lowest `block` Ritz vectors in Y.
  Eigen::VectorXd theta;
  auto rayleigh_ritz = [&](const Eigen::MatrixXd& S) {
    const Eigen::MatrixXd V = m_orthonormalize(S, M);
    Eigen::MatrixXd H = V.transpose() * (A * V);
    H = 0.5 * (H + H.transpose()).eval();
    // explicit Gram matrix absorbs any residual loss of M-orthogonality
    Eigen::MatrixXd G = V.transpose() * (M * V);
    G = 0.5 * (G + G.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> small(H, G);
    if (small.info() != Eigen::Success) throw EigenError("eigensolver: Rayleigh-Ritz step failed");
    const Eigen::Index keep = std::min<Eigen::Index>(block, V.cols());
    if (keep < count) throw EigenError("eigensolver: search space collapsed");
    theta = small.eigenvalues().head(keep);
    return Eigen::MatrixXd(V * small.eigenvectors().leftCols(keep));
  };

  {
    const Eigen::MatrixXd Z1 = solve(M * Y);
    const Eigen::MatrixXd Z2 = solve(M * Z1);
    Eigen::MatrixXd S(n, 3 * Y.cols());
    S << Y, Z1, Z2;
    Y = rayleigh_ritz(S);
  }

  Eigen::MatrixXd P;
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    const Eigen::MatrixXd R = A * Y - (M * Y) * theta.asDiagonal();
    out.values.assign(theta.data(), theta.data() + count);
    out.residuals.assign(static_cast<std::size_t>(count), 0.0);
    bool converged = true;
    for (int j = 0; j < count; ++j) {
      const double res = std::sqrt((R.col(j).array().square() / lumped.array()).sum());
      out.residuals[static_cast<std::size_t>(j)] = res;
      if (!(res <= opt.tol * std::max(1.0, std::abs(theta(j))))) converged = false;
    }
    out.iterations = iter;
    if (converged) {
      out.vectors = Y.leftCols(count);
      return out;
    }
    // corrections from the residual keep full relative precision near convergence
    const Eigen::MatrixXd W1 = solve(R);
    const Eigen::MatrixXd W2 = solve(M * W1);
    Eigen::MatrixXd S(n, Y.cols() + W1.cols() + W2.cols() + P.cols());
    if (P.cols() > 0) S << Y, W1, W2, P;
    else S << Y, W1, W2;
    const Eigen::MatrixXd Ynew = rayleigh_ritz(S);
    const Eigen::Index kp = std::min(Y.cols(), Ynew.cols());
    P = Ynew.leftCols(kp) - Y * (Y.transpose() * (M * Ynew.leftCols(kp)));
    Y = Ynew;
  }
  std::ostringstream os;
  os << "eigensolver: no convergence after " << opt.max_iterations << " iterations (max residual "
     << *std::max_element(out.residuals.begin(), out.residuals.end()) << ")";
  throw EigenError(os.str());
}

} // namespace graphtube
