#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "graphtube/report_io.hpp"

namespace graphtube {

enum class ExperimentKind {
  GraphSpectrum,
  ManifoldSpectrum,
  ConvergeDelta,
  ConvergeDeltaPrimeGraph,
  ConvergeDeltaPrimeChain,
  ClosenessSuite,
  Constants,
  NorootScan,
  ValidateFem,
};

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(const std::string& name);
const std::vector<ExperimentKind>& all_experiment_kinds();

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::GraphSpectrum;
  int n = 3;
  std::string coupling = "delta"; ///< graph-spectrum: delta | delta_prime_s
  double q = -1.0;
  double beta = -1.0;
  std::vector<double> qs;         ///< closeness-suite; empty means {q}
  std::vector<double> betas;      ///< chain; empty means {beta}
  double alpha = 0.05;
  std::vector<double> eps{0.2, 0.1, 0.05};
  std::vector<double> a{0.2, 0.1, 0.05, 0.025};
  double h_factor = 8.0;          ///< h = ε / h_factor
  double region_factor = 8.0;     ///< chain: h in vertex regions = ε^{1+α} / region_factor
  int count = 4;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  int samples = 200;
  double fd_h = 1e-3;             ///< 0 disables the finite-difference oracle
  double resolvent_h = 0.005;     ///< 0 disables the resolvent surrogate
  double tol = 1e-3;
  double k_max = 12.0;
  double window_max = 10.0;       ///< Λ in [λ₀, Λ]
  std::array<double, 2> chain_window{0.5, 12.0};
  double kappa_max = 50.0;
  int a_points = 200;
  int kappa_points = 2000;
  int random_inputs = 1000;
  bool export_matrices = false;
};

/// Reads the documented keys; unknown keys and out-of-range values raise
/// InvalidParameter.
ExperimentConfig config_from_json(ExperimentKind kind, const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

struct Criterion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::GraphSpectrum;
  nlohmann::json report;
  std::vector<CsvTable> tables;
  std::vector<LogLogPlot> plots;
  std::vector<Criterion> criteria;
  std::vector<std::pair<std::string, std::string>> files; ///< extra (name, text) outputs

  [[nodiscard]] bool passed() const;
  [[nodiscard]] const Criterion* find(const std::string& name) const;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

ExperimentResult run_graph_spectrum(const ExperimentConfig& cfg);
ExperimentResult run_manifold_spectrum(const ExperimentConfig& cfg);
ExperimentResult run_converge_delta(const ExperimentConfig& cfg);
ExperimentResult run_converge_deltaprime_graph(const ExperimentConfig& cfg);
ExperimentResult run_converge_deltaprime_chain(const ExperimentConfig& cfg);
ExperimentResult run_closeness(const ExperimentConfig& cfg);
ExperimentResult run_constants(const ExperimentConfig& cfg);
ExperimentResult run_noroot_scan(const ExperimentConfig& cfg);
ExperimentResult run_validate_fem(const ExperimentConfig& cfg);

/// Writes report.json (with the criteria), tables, plots and extra files.
std::vector<std::filesystem::path> emit_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

/// Degrees of freedom the chain mesh would have; used by the cost guard.
double projected_chain_dof(int n, double eps, double alpha, double h_factor, double region_factor);
inline constexpr double kMaxDof = 5e5;

} // namespace graphtube
