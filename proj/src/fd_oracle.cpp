#include "graphtube/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "graphtube/error.hpp"

namespace graphtube {

namespace {

using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;

std::vector<double> piecewise_uniform(double length, double h, std::vector<double> breaks) {
  breaks.push_back(0.0);
  breaks.push_back(length);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> x{0.0};
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double lo = breaks[b], hi = breaks[b + 1];
    const auto cells = static_cast<long>(std::max(1.0, std::ceil((hi - lo) / h - 1e-9)));
    for (long i = 1; i <= cells; ++i)
      x.push_back(i == cells ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells));
  }
  return x;
}

} // namespace

FdSystem fd_assemble(const MetricGraph& g, double h, const std::vector<double>& extra_breaks) {
  if (!(h > 0.0) || h > g.min_length() / 10.0) throw InvalidParameter("fd oracle needs 0 < h <= l_-/10");
  const int n = g.degree();
  const auto p = g.weights();
  const bool prime = g.is_delta_prime();
  const double beta = g.center_strength();
  const bool constrained = prime && beta == 0.0;

  FdSystem sys;
  std::vector<Eigen::Index> offset;
  Eigen::Index nphys = 0;
  for (int e = 0; e < n; ++e) {
    std::vector<double> breaks;
    for (const auto& pt : g.point_interactions())
      if (pt.edge == e) breaks.push_back(pt.position);
    for (double b : extra_breaks)
      if (b > 0.0 && b < g.edge(e).length) breaks.push_back(b);
    sys.nodes.push_back(piecewise_uniform(g.edge(e).length, h, breaks));
    offset.push_back(nphys);
    nphys += static_cast<Eigen::Index>(sys.nodes.back().size());
  }

  // unknown numbering: centre unknowns first, then interior/outer nodes
  Eigen::Index ncentre = prime ? (constrained ? n - 1 : n) : 1;
  Eigen::Index dim = ncentre;
  std::vector<Triplet> pt;
  for (int e = 0; e < n; ++e) {
    const Eigen::Index row0 = offset[static_cast<std::size_t>(e)];
    if (!prime) {
      pt.emplace_back(row0, 0, p[static_cast<std::size_t>(e)]);
    } else if (!constrained || e < n - 1) {
      pt.emplace_back(row0, e, 1.0);
    } else {
      for (int j = 0; j < n - 1; ++j) pt.emplace_back(row0, j, -1.0);
    }
    for (std::size_t i = 1; i < sys.nodes[static_cast<std::size_t>(e)].size(); ++i)
      pt.emplace_back(row0 + static_cast<Eigen::Index>(i), dim++, 1.0);
  }
  if (dim > kFdMaxDim) throw ResourceLimit("fd oracle dimension exceeds 2e5; increase h");
  sys.P.resize(nphys, dim);
  sys.P.setFromTriplets(pt.begin(), pt.end());

  std::vector<Triplet> kt;
  sys.nodal_mass = Eigen::VectorXd::Zero(nphys);
  for (int e = 0; e < n; ++e) {
    const auto& x = sys.nodes[static_cast<std::size_t>(e)];
    const Eigen::Index o = offset[static_cast<std::size_t>(e)];
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double len = x[i + 1] - x[i];
      const Eigen::Index a = o + static_cast<Eigen::Index>(i), b = a + 1;
      kt.emplace_back(a, a, 1.0 / len);
      kt.emplace_back(b, b, 1.0 / len);
      kt.emplace_back(a, b, -1.0 / len);
      kt.emplace_back(b, a, -1.0 / len);
      sys.nodal_mass(a) += 0.5 * len;
      sys.nodal_mass(b) += 0.5 * len;
    }
    for (const auto& q : g.point_interactions()) {
      if (q.edge != e) continue;
      const auto it = std::find(x.begin(), x.end(), q.position);
      kt.emplace_back(o + static_cast<Eigen::Index>(it - x.begin()), o + static_cast<Eigen::Index>(it - x.begin()),
                      q.strength);
    }
  }
  if (prime && !constrained) {
    for (int e = 0; e < n; ++e)
      for (int f = 0; f < n; ++f)
        kt.emplace_back(offset[static_cast<std::size_t>(e)], offset[static_cast<std::size_t>(f)], 1.0 / beta);
  }
  SpMat kphys(nphys, nphys);
  kphys.setFromTriplets(kt.begin(), kt.end());
  SpMat mphys(nphys, nphys);
  std::vector<Triplet> mt;
  for (Eigen::Index i = 0; i < nphys; ++i) mt.emplace_back(i, i, sys.nodal_mass(i));
  mphys.setFromTriplets(mt.begin(), mt.end());

  sys.K = SpMat(sys.P.transpose() * kphys * sys.P);
  if (!prime) sys.K.coeffRef(0, 0) += g.center_strength();
  sys.M = SpMat(sys.P.transpose() * mphys * sys.P);
  sys.K.makeCompressed();
  sys.M.makeCompressed();
  return sys;
}

Eigen::Index fd_count_below(const FdSystem& sys, double sigma) {
  SpMat a = sys.K - sigma * sys.M;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw EigenError("fd oracle: LDLT factorization failed");
  const auto& d = ldlt.vectorD();
  Eigen::Index neg = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d(i) < 0.0) ++neg;
  return neg;
}

namespace {

class InertiaCounter {
public:
  explicit InertiaCounter(const FdSystem& sys) : sys_(sys) {
    SpMat a = sys_.K + sys_.M;
    ldlt_.analyzePattern(a);
  }

  Eigen::Index operator()(double sigma) {
    if (auto it = cache_.find(sigma); it != cache_.end()) return it->second;
    SpMat a = sys_.K - sigma * sys_.M;
    ldlt_.factorize(a);
    if (ldlt_.info() != Eigen::Success) throw EigenError("fd oracle: LDLT factorization failed");
    const auto& d = ldlt_.vectorD();
    Eigen::Index neg = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
      if (d(i) < 0.0) ++neg;
    cache_[sigma] = neg;
    return neg;
  }

  const std::map<double, Eigen::Index>& samples() const { return cache_; }

private:
  const FdSystem& sys_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  std::map<double, Eigen::Index> cache_;
};

} // namespace

SpectralResult fd_oracle(const MetricGraph& graph, double h, int count) {
  if (count < 1) throw InvalidParameter("fd oracle needs count >= 1");
  const auto sys = fd_assemble(graph, h);
  if (count > sys.dim()) throw InvalidParameter("fd oracle: count exceeds the dimension");
  InertiaCounter counter(sys);

  double lo = -1.0;
  while (counter(lo) > 0) lo = 2.0 * lo - 1.0;
  double hi = 1.0;
  while (counter(hi) < count) hi = 2.0 * hi + 1.0;

  std::vector<double> values;
  for (Eigen::Index j = 1; j <= count; ++j) {
    // tightest known bracket: count(a) < j <= count(b)
    double a = lo, b = hi;
    for (const auto& [s, c] : counter.samples()) {
      if (c < j) a = std::max(a, s);
      else b = std::min(b, s);
    }
    for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
      const double m = 0.5 * (a + b);
      if (m == a || m == b) break;
      if (counter(m) < j) a = m;
      else b = m;
    }
    values.push_back(0.5 * (a + b));
  }
  return SpectralResult::from_values(std::move(values), ModelTag::Graph, SolverTag::FdOracle);
}

double fd_resolvent_difference(const IntermediateParams& params, double h) {
  const auto inter = fd_assemble(intermediate_graph(params), h);
  const auto limit = fd_assemble(build_unit_star(params.n, DeltaPrimeS{params.beta}), h, {params.a});
  if (inter.nodal_mass.size() != limit.nodal_mass.size())
    throw AssemblyError("resolvent surrogate: grids do not match");
  if (inter.nodal_mass.size() > 4000) throw ResourceLimit("resolvent surrogate is dense; increase h");

  using CMat = Eigen::MatrixXcd;
  const std::complex<double> z(0.0, 1.0);
  const Eigen::VectorXd sqm = inter.nodal_mass.cwiseSqrt();
  auto resolvent = [&](const FdSystem& s) {
    const Eigen::MatrixXd k = Eigen::MatrixXd(s.K);
    const Eigen::MatrixXd m = Eigen::MatrixXd(s.M);
    const CMat a = k.cast<std::complex<double>>() - z * m.cast<std::complex<double>>();
    const Eigen::MatrixXd p = Eigen::MatrixXd(s.P);
    // M^{1/2} P (A − zM)^{-1} Pᵀ M^{1/2}
    const Eigen::MatrixXd pm = p.transpose() * sqm.asDiagonal();
    const CMat x = a.partialPivLu().solve(pm.cast<std::complex<double>>());
    return CMat(pm.transpose().cast<std::complex<double>>() * x);
  };
  const CMat diff = resolvent(inter) - resolvent(limit);
  // largest singular value from the Hermitian DᴴD
  const CMat gram = diff.adjoint() * diff;
  Eigen::SelfAdjointEigenSolver<CMat> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

} // namespace graphtube
