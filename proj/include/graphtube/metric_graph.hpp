#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace graphtube {

/// δ-coupling: continuity in the weighted sense and Σ p_e f'_e(0) = q f(v).
struct Delta {
  double strength = 0.0;
};

/// Symmetric δ′: equal derivatives and Σ f_e(0) = β f'(0).
struct DeltaPrimeS {
  double strength = 0.0;
};

/// Free end of an edge; carries the Neumann condition f'_e(ℓ_e) = 0.
struct FreeEnd {};

using VertexCoupling = std::variant<Delta, DeltaPrimeS, FreeEnd>;

struct Edge {
  double length = 1.0;
  double weight = 1.0;
};

/// δ-interaction at an interior point of an edge (a degree-2 vertex with
/// unit weights). Used for the intermediate Hamiltonian.
struct PointInteraction {
  int edge = 0;
  double position = 0.0;
  double strength = 0.0;
};

/// Star-shaped metric graph: one interior vertex v0 where every edge starts
/// (s = 0), free Neumann ends at s = ℓ_e, optional point δ's along edges.
class MetricGraph {
public:
  MetricGraph(std::vector<Edge> edges, VertexCoupling center,
              std::vector<PointInteraction> points = {});

  [[nodiscard]] int degree() const { return static_cast<int>(edges_.size()); }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const Edge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }
  [[nodiscard]] const VertexCoupling& center_coupling() const { return center_; }
  [[nodiscard]] static VertexCoupling outer_coupling() { return FreeEnd{}; }
  [[nodiscard]] const std::vector<PointInteraction>& point_interactions() const { return points_; }

  [[nodiscard]] std::vector<double> weights() const;
  [[nodiscard]] std::vector<double> lengths() const;
  /// ℓ_- = min_e ℓ_e
  [[nodiscard]] double min_length() const;
  /// ℓ₀ = min{1, ℓ_-}
  [[nodiscard]] double ell0() const;
  /// |p|² = Σ p_e²
  [[nodiscard]] double weight_norm_sq() const;
  /// vol X_E = Σ ℓ_e p_e²
  [[nodiscard]] double edge_volume() const;

  [[nodiscard]] bool is_delta() const { return std::holds_alternative<Delta>(center_); }
  [[nodiscard]] bool is_delta_prime() const { return std::holds_alternative<DeltaPrimeS>(center_); }
  /// Strength of the central coupling (q for δ, β for δ′ₛ).
  [[nodiscard]] double center_strength() const;
  /// All edges of equal length and all weights equal to one.
  [[nodiscard]] bool is_uniform_unit() const;

private:
  std::vector<Edge> edges_;
  VertexCoupling center_;
  std::vector<PointInteraction> points_;
};

/// Star graph with n edges meeting at v0; Neumann conditions at the free ends.
MetricGraph build_star(int n, std::span<const double> lengths, std::span<const double> weights,
                       VertexCoupling coupling);

/// Unit star: n edges of length 1 and weight 1.
MetricGraph build_unit_star(int n, VertexCoupling coupling);

/// Parse { "edges": [{"length", "weight"}], "coupling": {"type", "strength"} }.
MetricGraph graph_from_json(const nlohmann::json& doc);
nlohmann::json graph_to_json(const MetricGraph& graph);

/// Piecewise-linear function on the edges of a star graph. Each edge carries an
/// increasing node list starting at s = 0 and ending at s = ℓ_e.
class GraphFunction {
public:
  using EdgeSampler = std::function<double(int edge, double s)>;

  GraphFunction(MetricGraph graph, std::vector<std::vector<double>> nodes,
                std::vector<std::vector<double>> values);

  /// Uniform grid with step ≤ h on every edge; values sampled from `fn`.
  static GraphFunction sample(const MetricGraph& graph, double h, const EdgeSampler& fn);
  /// As `sample`, but shifted per edge so that f_e(0) = vertex_value · p_e
  /// holds exactly.
  static GraphFunction sample_weighted(const MetricGraph& graph, double h, double vertex_value,
                                       const EdgeSampler& fn);
  static std::vector<double> uniform_nodes(double length, double h);

  [[nodiscard]] const MetricGraph& graph() const { return graph_; }
  [[nodiscard]] int edge_count() const { return graph_.degree(); }
  [[nodiscard]] const std::vector<double>& nodes(int e) const { return nodes_.at(static_cast<std::size_t>(e)); }
  [[nodiscard]] const std::vector<double>& values(int e) const { return values_.at(static_cast<std::size_t>(e)); }
  std::vector<double>& values(int e) { return values_.at(static_cast<std::size_t>(e)); }
  [[nodiscard]] double max_step() const;

  /// Evaluation vector (f_e(0))_e.
  [[nodiscard]] std::vector<double> endpoint_vector() const;
  /// f(v): coefficient of the projection of the evaluation vector onto span(p).
  [[nodiscard]] double vertex_value() const;
  /// Relative residual of the projection of the evaluation vector onto span(p).
  [[nodiscard]] double weighted_space_residual() const;
  [[nodiscard]] bool in_weighted_space(double tol = 1e-12) const;

  /// Linear interpolation on edge e.
  [[nodiscard]] double evaluate(int e, double s) const;

  /// ‖f‖² of the piecewise-linear interpolant (exact integration).
  [[nodiscard]] double norm_sq() const;
  /// ‖f'‖² from centred differences at cell midpoints.
  [[nodiscard]] double derivative_norm_sq() const;
  [[nodiscard]] double sobolev_norm_sq() const { return norm_sq() + derivative_norm_sq(); }
  [[nodiscard]] double inner(const GraphFunction& other) const;
  [[nodiscard]] double derivative_inner(const GraphFunction& other) const;

private:
  MetricGraph graph_;
  std::vector<std::vector<double>> nodes_;
  std::vector<std::vector<double>> values_;
};

/// Both sides of an inequality evaluated on a discrete function together with
/// the discretisation slack allowed on the right-hand side.
struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double tol_disc = 0.0;
  double slack_constant = 0.0;
  double constant = 0.0; ///< C_η for the form bound, unused for the trace bound

  [[nodiscard]] bool holds() const { return lhs <= rhs * (1.0 + tol_disc) + 1e-300; }
};

/// Slack constant C in tol_disc = C·h.
inline constexpr double kDiscretisationSlack = 10.0;

/// |f(v)|² ≤ |p|⁻² (a‖f'‖² + (2/a)‖f‖²) for 0 < a ≤ ℓ_-.
InequalityCheck trace_bound_check(const GraphFunction& f, double a);

/// |q(v)||f(v)|² ≤ η‖f'‖² + C_η‖f‖² for η ∈ (0,1).
InequalityCheck form_bound_check(const GraphFunction& f, double eta);

} // namespace graphtube
