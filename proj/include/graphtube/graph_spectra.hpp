#pragma once

#include <optional>
#include <vector>

#include "graphtube/metric_graph.hpp"
#include "graphtube/spectral_result.hpp"

namespace graphtube {

/// Parameters of the intermediate Hamiltonian: δ of strength b(a) = −β/a²
/// at the centre and δ's of strength c(a) = −1/a at distance a on each edge.
struct IntermediateParams {
  double beta = 0.0;
  double a = 0.1;
  int n = 3;

  [[nodiscard]] double b() const { return -beta / (a * a); }
  [[nodiscard]] double c() const { return -1.0 / a; }
  void validate() const;
};

struct KappaRoot {
  double kappa = 0.0;
  int multiplicity = 1;
};

/// Values (f(0), f'(0)) of the solution of −f'' = λf that satisfies the
/// Neumann condition at the far end of an edge (up to a positive factor).
struct EdgeShot {
  double u = 1.0;
  double d = 0.0;
};

EdgeShot shoot_edge(double length, const std::vector<PointInteraction>& points, double lambda);

/// Unique κ > 0 with cosh κ + (βκ/n) sinh κ = 0 for β < 0; none for β ≥ 0.
std::optional<double> solve_kappa_beta(double beta, int n);

/// Secular spectrum of a star graph (δ or δ′ₛ centre, Neumann ends, optional
/// point δ's): all eigenvalues k² with k ≤ k_max plus the negative ones.
SpectralResult secular_spectrum(const MetricGraph& graph, double k_max);

SpectralResult star_delta_spectrum(double q, int n, double k_max);
SpectralResult star_deltaprime_spectrum(double beta, int n, double k_max);

/// The star graph carrying the intermediate Hamiltonian.
MetricGraph intermediate_graph(const IntermediateParams& params);

/// Symmetric branch, divided by cosh(κa)·cosh κ(1−a).
double intermediate_symmetric_branch(double kappa, const IntermediateParams& params);
/// Multiplicity-(n−1) branch sinh(κa)cosh κ(1−a) − κa cosh κ, raw form.
double intermediate_multiplicity_branch(double kappa, double a);
/// Same branch divided by cosh(κa)·cosh κ(1−a).
double intermediate_multiplicity_branch_scaled(double kappa, double a);

std::vector<KappaRoot> intermediate_negative_spectrum(const IntermediateParams& params);
SpectralResult intermediate_full_spectrum(const IntermediateParams& params, double k_max);

/// Rayleigh quotient of the constant function for the intermediate form.
double rayleigh_constant_test(double beta, double a, int n);
/// The closed form −(1/n)(β/a² + 1/a) quoted for that quotient.
double rayleigh_displayed_value(double beta, double a, int n);

/// Coupling residuals of the eigenfunction built from the shooting data at λ:
/// continuity and derivative balance (δ) or derivative equality and sum
/// condition (δ′ₛ), for a unit coefficient vector.
struct VertexResidual {
  double continuity = 0.0;
  double balance = 0.0;
};

VertexResidual vertex_condition_residual(const MetricGraph& graph, double lambda);

} // namespace graphtube
