#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "graphtube/fatgraph_mesh.hpp"
#include "graphtube/sparse_eigen.hpp"
#include "graphtube/spectral_result.hpp"

namespace graphtube {

/// Piecewise constant potential, already scaled to X_ε.
struct PotentialSpec {
  double vertex = 0.0;    ///< value on εX_v
  double satellite = 0.0; ///< value on each satellite region
  double edge = 0.0;      ///< always zero for the models here

  [[nodiscard]] double value(const RegionTag& tag) const;
  /// Most negative value (0 if none is negative).
  [[nodiscard]] double min_value() const;
  [[nodiscard]] double sup_norm() const;

  static PotentialSpec none() { return {}; }
  /// Q constant on X_v with ∫Q = q, scaled by 1/ε: Q_ε = q / (ε vol X_v).
  static PotentialSpec delta(double q, double eps, double vol_v);
  /// −β/(ε^{1+2α} vol X_{v0}) on the central region, −ε^{−1−α} on satellites.
  static PotentialSpec deltaprime_chain(double beta, double alpha, double eps, double vol_v0);
};

struct FemSystem {
  SparseMatrix K;
  SparseMatrix M;
  SparseMatrix V;
  std::vector<bool> vertex_mask;    ///< node touches the central vertex region
  std::vector<bool> satellite_mask; ///< node touches a satellite region
  PotentialSpec potential;
  double area = 0.0;

  [[nodiscard]] Eigen::Index dof() const { return K.rows(); }
  [[nodiscard]] SparseMatrix hamiltonian() const { return SparseMatrix(K + V); }
};

/// P1 stiffness, consistent mass and region-restricted potential matrices.
FemSystem assemble(const FatGraphMesh& mesh, const PotentialSpec& potential);

/// Lowest `count` eigenpairs of (K + V)x = λMx. NaN shift selects one below
/// the spectrum using the bound λ ≥ min V.
SpectralResult eigensolve(const FemSystem& sys, int count,
                          double shift = std::numeric_limits<double>::quiet_NaN(), double tol = 1e-8);

struct LowerBoundCheck {
  double min_eigenvalue = 0.0;
  double lambda0 = 0.0;
  double tolerance = 0.0;
  double rayleigh_constant = 0.0; ///< ⟨1, V 1⟩ / ⟨1, M 1⟩
  bool lower_holds = false;
  bool upper_applies = false;     ///< only for nonpositive potentials
  bool upper_holds = true;

  [[nodiscard]] bool holds() const { return lower_holds && upper_holds; }
};

LowerBoundCheck lower_bound_check(const FemSystem& sys, double lambda0);

/// Coordinate text format: header "rows cols nnz", then "row col value".
void export_coo(const SparseMatrix& A, std::ostream& os);

struct VertexRegionData {
  double area = 0.0;
  double port_total = 0.0;
  double c_vol = 0.0;
  double lambda2_v = 0.0;
  double lambda2_e = 0.0;
  double lambda2_coarse = 0.0; ///< FEM value at refinement m
  double lambda2_fine = 0.0;   ///< FEM value at refinement 2m
};

/// λ₂(v) by FEM on the template at refinements m and 2m, Richardson
/// extrapolated (P1 eigenvalues converge like h²).
VertexRegionData vertex_region_data(const VertexTemplate& vertex, int m = 16);

} // namespace graphtube
