#include "graphtube/manifold_fem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "graphtube/error.hpp"

namespace graphtube {

double PotentialSpec::value(const RegionTag& tag) const {
  switch (tag.kind) {
  case RegionKind::Vertex: return vertex;
  case RegionKind::Satellite: return satellite;
  case RegionKind::Edge: return edge;
  }
  return 0.0;
}

double PotentialSpec::min_value() const { return std::min({0.0, vertex, satellite, edge}); }

double PotentialSpec::sup_norm() const {
  return std::max({std::abs(vertex), std::abs(satellite), std::abs(edge)});
}

PotentialSpec PotentialSpec::delta(double q, double eps, double vol_v) {
  if (!(eps > 0.0) || !(vol_v > 0.0)) throw InvalidParameter("delta potential needs eps > 0 and vol X_v > 0");
  PotentialSpec p;
  p.vertex = q / (eps * vol_v);
  return p;
}

PotentialSpec PotentialSpec::deltaprime_chain(double beta, double alpha, double eps, double vol_v0) {
  if (!(eps > 0.0) || !(vol_v0 > 0.0)) throw InvalidParameter("chain potential needs eps > 0 and vol X_v > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("chain potential needs 0 < alpha < 1");
  PotentialSpec p;
  p.vertex = -beta / (std::pow(eps, 1.0 + 2.0 * alpha) * vol_v0);
  p.satellite = -std::pow(eps, -1.0 - alpha);
  return p;
}

FemSystem assemble(const FatGraphMesh& mesh, const PotentialSpec& potential) {
  using Triplet = Eigen::Triplet<double>;
  const auto n = static_cast<Eigen::Index>(mesh.nodes.size());
  if (n == 0) throw AssemblyError("empty mesh");
  std::vector<Triplet> kt, mt, vt;
  kt.reserve(9 * mesh.triangles.size());
  mt.reserve(9 * mesh.triangles.size());
  FemSystem sys;
  sys.potential = potential;
  sys.vertex_mask.assign(static_cast<std::size_t>(n), false);
  sys.satellite_mask.assign(static_cast<std::size_t>(n), false);

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector2d& x0 = mesh.nodes[static_cast<std::size_t>(tri[0])];
    const Eigen::Vector2d& x1 = mesh.nodes[static_cast<std::size_t>(tri[1])];
    const Eigen::Vector2d& x2 = mesh.nodes[static_cast<std::size_t>(tri[2])];
    const double det = (x1 - x0).x() * (x2 - x0).y() - (x1 - x0).y() * (x2 - x0).x();
    const double area = 0.5 * det;
    if (!(area > 0.0) || !std::isfinite(area)) {
      std::ostringstream os;
      os << "degenerate triangle " << t << " (signed area " << area << ")";
      throw AssemblyError(os.str());
    }
    sys.area += area;
    // gradients of barycentric coordinates: ∇φ_i = rot(x_{i+2} − x_{i+1}) / (2 area)
    Eigen::Matrix<double, 3, 2> grad;
    const std::array<const Eigen::Vector2d*, 3> x{&x0, &x1, &x2};
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d e = *x[static_cast<std::size_t>((i + 2) % 3)] - *x[static_cast<std::size_t>((i + 1) % 3)];
      grad(i, 0) = -e.y() / det;
      grad(i, 1) = e.x() / det;
    }
    const Eigen::Matrix3d kl = area * grad * grad.transpose();
    const double vq = potential.value(mesh.region[t]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double m = area / 12.0 * (i == j ? 2.0 : 1.0);
        kt.emplace_back(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)], kl(i, j));
        mt.emplace_back(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)], m);
        if (vq != 0.0) vt.emplace_back(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)], vq * m);
      }
    for (int i : tri) {
      if (mesh.region[t].kind == RegionKind::Vertex) sys.vertex_mask[static_cast<std::size_t>(i)] = true;
      if (mesh.region[t].kind == RegionKind::Satellite) sys.satellite_mask[static_cast<std::size_t>(i)] = true;
    }
  }
  sys.K.resize(n, n);
  sys.M.resize(n, n);
  sys.V.resize(n, n);
  sys.K.setFromTriplets(kt.begin(), kt.end());
  sys.M.setFromTriplets(mt.begin(), mt.end());
  sys.V.setFromTriplets(vt.begin(), vt.end());
  // enforce exact symmetry against summation-order differences
  auto symmetrize = [](SparseMatrix& A) {
    SparseMatrix At = A.transpose();
    A = 0.5 * (A + At);
    A.makeCompressed();
  };
  symmetrize(sys.K);
  symmetrize(sys.M);
  symmetrize(sys.V);
  return sys;
}

SpectralResult eigensolve(const FemSystem& sys, int count, double shift, double tol) {
  if (count < 1) throw InvalidParameter("eigensolve needs count >= 1");
  EigenOptions opt;
  opt.shift = shift;
  opt.tol = tol;
  opt.lower_bound = sys.potential.min_value() - 1.0;
  const auto pairs = shift_invert_eigs(sys.hamiltonian(), sys.M, count, opt);
  auto r = SpectralResult::from_values(pairs.values, ModelTag::Manifold, SolverTag::Fem);
  r.eigenvectors = pairs.vectors;
  r.residuals = pairs.residuals;
  return r;
}

LowerBoundCheck lower_bound_check(const FemSystem& sys, double lambda0) {
  LowerBoundCheck c;
  c.lambda0 = lambda0;
  c.tolerance = 1e-8 * std::max(1.0, std::abs(lambda0));
  c.min_eigenvalue = eigensolve(sys, 1).eigenvalues.front();
  c.lower_holds = c.min_eigenvalue >= lambda0 - c.tolerance;
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(sys.dof());
  c.rayleigh_constant = one.dot(sys.V * one) / one.dot(sys.M * one);
  c.upper_applies = sys.potential.vertex <= 0.0 && sys.potential.satellite <= 0.0 && sys.potential.edge <= 0.0;
  if (c.upper_applies)
    c.upper_holds = c.min_eigenvalue <= c.rayleigh_constant + 1e-8 * std::max(1.0, std::abs(c.rayleigh_constant));
  return c;
}

void export_coo(const SparseMatrix& A, std::ostream& os) {
  os << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  os.precision(17);
  for (Eigen::Index k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

VertexRegionData vertex_region_data(const VertexTemplate& vertex, int m) {
  if (m < 2) throw InvalidParameter("vertex_region_data needs m >= 2");
  VertexRegionData d;
  d.area = vertex.area;
  d.port_total = vertex.port_total;
  d.c_vol = vertex.c_vol();
  d.lambda2_e = M_PI * M_PI / (vertex.port_length * vertex.port_length);
  auto lambda2 = [&](int level) {
    const auto sys = assemble(build_template_mesh(vertex, level), PotentialSpec::none());
    return eigensolve(sys, 2).eigenvalues[1];
  };
  d.lambda2_coarse = lambda2(m);
  d.lambda2_fine = lambda2(2 * m);
  d.lambda2_v = (4.0 * d.lambda2_fine - d.lambda2_coarse) / 3.0;
  return d;
}

} // namespace graphtube
