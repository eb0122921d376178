#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "graphtube/estimates.hpp"
#include "graphtube/fatgraph_mesh.hpp"
#include "graphtube/metric_graph.hpp"

namespace graphtube {

/// Function on X_ε stored region by region: nodal values on the vertex
/// polygon and one station × level table per strip. Port nodes appear in both,
/// so functions that jump across the ports (like Jf) are representable.
struct ManifoldField {
  Eigen::VectorXd vertex;             ///< indexed like mesh.vertex_nodes
  std::vector<Eigen::MatrixXd> strips; ///< strips[e](i, j) at station i, level j

  ManifoldField& operator+=(const ManifoldField& o);
  ManifoldField& operator-=(const ManifoldField& o);
  ManifoldField& operator*=(double c);
};

ManifoldField zero_field(const FatGraphMesh& mesh);
/// Restriction of a continuous nodal vector to the regions.
ManifoldField restrict_field(const FatGraphMesh& mesh, const Eigen::VectorXd& u);
/// Largest |vertex value − strip value| over port nodes.
double port_jump(const FatGraphMesh& mesh, const ManifoldField& u);
/// Nodal vector of a field that is continuous across ports (jump ≤ tol).
Eigen::VectorXd to_nodal(const FatGraphMesh& mesh, const ManifoldField& u, double tol = 0.0);

double field_inner(const FatGraphMesh& mesh, const ManifoldField& a, const ManifoldField& b);
double field_norm_sq(const FatGraphMesh& mesh, const ManifoldField& u);
/// ‖∇u‖² summed over all regions.
double field_energy(const FatGraphMesh& mesh, const ManifoldField& u);
double vertex_norm_sq(const FatGraphMesh& mesh, const ManifoldField& u);
double vertex_energy(const FatGraphMesh& mesh, const ManifoldField& u);
StripFunction strip_function(const FatGraphMesh& mesh, const ManifoldField& u, int e);

/// Graph function on the strip station grid; f_e(0) = vertex_value · p_e.
/// Requires strips without satellites.
GraphFunction graph_function_on_mesh(const FatGraphMesh& mesh, const MetricGraph& graph, double vertex_value,
                                     const GraphFunction::EdgeSampler& fn);

/// Jf = ε^{−1/2} f_e(s) (vol Y_e)^{−1/2} on strips, 0 on the vertex region.
ManifoldField apply_J(const GraphFunction& f, const FatGraphMesh& mesh);
/// J plus the constant ε^{−1/2} f(v) on the vertex region.
ManifoldField apply_J1(const GraphFunction& f, const FatGraphMesh& mesh);
/// Discrete adjoint of J: the L²(G) projection of ε^{1/2} p_e (average of u)
/// onto piecewise linear functions on the station grid.
GraphFunction apply_Jprime(const ManifoldField& u, const FatGraphMesh& mesh, const MetricGraph& graph);

/// Piecewise affine cut-off: χ_e(0) = 1, χ_e(a) = 0, zero beyond a.
struct CutoffProfile {
  double a = 1.0;

  [[nodiscard]] double value(double s) const;
  /// ‖χ_e‖² = a/3 and ‖χ′_e‖² = 1/a.
  [[nodiscard]] double norm_sq() const { return a / 3.0; }
  [[nodiscard]] double derivative_norm_sq() const { return 1.0 / a; }
};

/// J′u corrected by χ_e so that the endpoint vector equals ε^{1/2} p avint_v u.
GraphFunction apply_Jprime1(const ManifoldField& u, const FatGraphMesh& mesh, const MetricGraph& graph,
                            const CutoffProfile& chi);

/// Normalised integral over the scaled vertex region.
double average_vertex(const FatGraphMesh& mesh, const ManifoldField& u);
/// Normalised transverse integral of strip e at station i (exact for P1).
double average_station(const FatGraphMesh& mesh, const ManifoldField& u, int e, std::size_t i);
/// ‖u‖² on the port of strip e.
double port_norm_sq(const FatGraphMesh& mesh, const ManifoldField& u, int e);

struct ClosenessConfig {
  int n = 3;
  double eps = 0.1;
  double q = 0.0;          ///< ∫Q over X_v
  double h = 0.0;          ///< 0 means ε/8
  int samples = 200;
  std::uint64_t seed = 1;
  int eigen_count = 8;
  double tol_disc = 0.1;
  unsigned threads = 1;
};

inline constexpr std::array<const char*, 7> kClosenessQuantities{
    "J_minus_J1_sq", "Jp_minus_Jp1_sq", "Jf_norm_defect", "JpJf_minus_f", "JJp_minus_u_sq", "form_mismatch",
    "Jp_norm_sq_excess"};

struct ClosenessSample {
  std::array<double, 7> measured{};
  std::array<double, 7> bound{};
  std::array<double, 7> ratio{};
};

struct ClosenessReport {
  ClosenessConfig config;
  BoundInputs inputs;
  BoundReport bounds;
  std::vector<ClosenessSample> samples;
  std::array<double, 7> max_ratio{};
  bool all_finite = true;
  bool passed = false;
};

/// Six closeness quantities (plus ‖J′u‖ ≤ ‖u‖) on seeded smooth samples.
ClosenessReport closeness_suite(const ClosenessConfig& config);

nlohmann::json to_json(const ClosenessReport& r);
/// One row per sample: index and the ratio of each quantity.
std::string closeness_csv(const ClosenessReport& r);

} // namespace graphtube
