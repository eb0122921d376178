#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "graphtube/graph_spectra.hpp"
#include "graphtube/metric_graph.hpp"
#include "graphtube/spectral_result.hpp"

namespace graphtube {

/// Finite-difference form matrices: linear elements with lumped mass on
/// piecewise-uniform edge grids that contain every point interaction.
/// Unknowns follow the centre coupling: one shared value for δ, independent
/// end values for δ′ₛ (β ≠ 0), end values summing to zero for β = 0.
struct FdSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::SparseMatrix<double> M;
  /// Maps unknowns to nodal values (edge by edge, node 0 at the centre).
  Eigen::SparseMatrix<double> P;
  Eigen::VectorXd nodal_mass;
  std::vector<std::vector<double>> nodes;
  [[nodiscard]] Eigen::Index dim() const { return K.rows(); }
};

inline constexpr Eigen::Index kFdMaxDim = 200000;

/// `extra_breaks` adds grid nodes at these edge coordinates on every edge.
FdSystem fd_assemble(const MetricGraph& graph, double h, const std::vector<double>& extra_breaks = {});

/// Number of eigenvalues of K x = λ M x below sigma (Sylvester inertia).
Eigen::Index fd_count_below(const FdSystem& sys, double sigma);

/// Lowest `count` eigenvalues by inertia bisection.
SpectralResult fd_oracle(const MetricGraph& graph, double h, int count);

/// ‖(H^{β,a} − i)⁻¹ − (H^β − i)⁻¹‖ with both operators discretised on one
/// grid of step ≈ h that has nodes at s = a.
double fd_resolvent_difference(const IntermediateParams& params, double h);

} // namespace graphtube
