#include "graphtube/spectral_result.hpp"

#include <algorithm>
#include <cmath>

namespace graphtube {

std::string to_string(ModelTag m) { return m == ModelTag::Graph ? "graph" : "manifold"; }

std::string to_string(SolverTag s) {
  switch (s) {
  case SolverTag::Secular: return "secular";
  case SolverTag::FdOracle: return "fd-oracle";
  case SolverTag::Fem: return "fem";
  }
  return "unknown";
}

SpectralResult SpectralResult::from_values(std::vector<double> values, ModelTag model, SolverTag solver,
                                           double gap) {
  SpectralResult r;
  r.eigenvalues = std::move(values);
  r.model = model;
  r.solver = solver;
  r.recluster(gap);
  return r;
}

void SpectralResult::recluster(double gap) {
  cluster_gap = gap;
  std::sort(eigenvalues.begin(), eigenvalues.end());
  cluster_values.clear();
  multiplicities.clear();
  std::size_t i = 0;
  while (i < eigenvalues.size()) {
    std::size_t j = i + 1;
    double sum = eigenvalues[i];
    while (j < eigenvalues.size() &&
           eigenvalues[j] - eigenvalues[j - 1] <= gap * std::max(1.0, std::abs(eigenvalues[j])))
      sum += eigenvalues[j++];
    cluster_values.push_back(sum / static_cast<double>(j - i));
    multiplicities.push_back(static_cast<int>(j - i));
    i = j;
  }
}

std::vector<double> SpectralResult::lowest(std::size_t count) const {
  const auto m = std::min(count, eigenvalues.size());
  return {eigenvalues.begin(), eigenvalues.begin() + static_cast<std::ptrdiff_t>(m)};
}

std::vector<double> SpectralResult::in_window(double lo, double hi) const {
  std::vector<double> out;
  for (double v : eigenvalues)
    if (v >= lo && v <= hi) out.push_back(v);
  return out;
}

nlohmann::json to_json(const SpectralResult& r) {
  nlohmann::json j;
  j["model"] = to_string(r.model);
  j["solver"] = to_string(r.solver);
  j["eigenvalues"] = r.eigenvalues;
  j["clusters"] = r.cluster_values;
  j["multiplicities"] = r.multiplicities;
  j["cluster_gap"] = r.cluster_gap;
  j["residuals"] = r.residuals;
  return j;
}

} // namespace graphtube
