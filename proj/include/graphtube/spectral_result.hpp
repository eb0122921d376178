#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace graphtube {

enum class ModelTag { Graph, Manifold };
enum class SolverTag { Secular, FdOracle, Fem };

std::string to_string(ModelTag m);
std::string to_string(SolverTag s);

/// Sorted eigenvalues (repeated according to multiplicity) with clusters.
struct SpectralResult {
  std::vector<double> eigenvalues;
  std::vector<double> cluster_values;
  std::vector<int> multiplicities;
  double cluster_gap = 1e-8;
  Eigen::MatrixXd eigenvectors; ///< columns; empty when not computed
  std::vector<double> residuals;
  ModelTag model = ModelTag::Graph;
  SolverTag solver = SolverTag::Secular;

  /// Sort and cluster values closer than gap · max(1, |λ|).
  static SpectralResult from_values(std::vector<double> values, ModelTag model, SolverTag solver,
                                    double gap = 1e-8);
  void recluster(double gap);

  [[nodiscard]] std::size_t size() const { return eigenvalues.size(); }
  [[nodiscard]] bool empty() const { return eigenvalues.empty(); }
  /// First `count` eigenvalues (fewer if not available).
  [[nodiscard]] std::vector<double> lowest(std::size_t count) const;
  /// Eigenvalues inside [lo, hi].
  [[nodiscard]] std::vector<double> in_window(double lo, double hi) const;
};

nlohmann::json to_json(const SpectralResult& r);

} // namespace graphtube
