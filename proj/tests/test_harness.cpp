#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "graphtube/convergence.hpp"
#include "graphtube/error.hpp"
#include "graphtube/estimates.hpp"
#include "graphtube/experiments.hpp"
#include "graphtube/report_io.hpp"

using namespace graphtube;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

long count_of(const std::string& text, const std::string& needle) {
  long n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("graphtube_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

} // namespace

TEST(Estimates, UnitStarExample) {
  BoundInputs in;
  in.q_sup = 1.0 / 0.4330127018922193;
  in.ell_minus = 1.0;
  in.lambda2_v = 16.0 * M_PI * M_PI / 9.0;
  in.lambda2_E = M_PI * M_PI;
  in.c_vol = 0.14433756729740643;
  in.p_norm_sq = 3.0;
  in.q_v = -1.0;
  in.eps = 0.1;
  const auto b = compute_bounds(in, 0.5);
  // c‖Q‖ = 1/3, so C̃_{1/2} = (8/3) max{8/3, 1}
  EXPECT_NEAR(b.Ct_half, 64.0 / 9.0, 1e-13);
  EXPECT_DOUBLE_EQ(b.lambda0, -b.Ct_half);
  EXPECT_NEAR(b.C_half, 2.0 * std::max(1.0 / (0.5 * 9.0), 1.0 / 3.0), 1e-14);
  EXPECT_LE(b.C_half, b.C_half_chain);
  EXPECT_LE(b.C_half_chain, b.Ct_half);
  EXPECT_EQ(b.delta_active, 3u);
  EXPECT_NEAR(b.delta_sq, 0.2 * (1.0 + 2.0 / in.lambda2_v), 1e-15);
}

TEST(Estimates, ZeroPotential) {
  BoundInputs in{0.0, 1.0, 17.5, 9.87, 0.144, 3.0, 0.0, 0.1};
  const auto b = compute_bounds(in, 0.5);
  EXPECT_EQ(b.Ct_half, 0.0);
  EXPECT_FALSE(std::signbit(b.lambda0));
  EXPECT_TRUE(std::isinf(b.eps_half));
  EXPECT_TRUE(to_json(b)["eps_half"].is_null());
}

TEST(Estimates, Rejects) {
  BoundInputs in{1.0, 1.0, 17.5, 9.87, 0.144, 3.0, 0.0, 0.1};
  EXPECT_THROW(compute_bounds(in, 1.0), InvalidParameter);
  in.eps = 0.0;
  EXPECT_THROW(compute_bounds(in, 0.5), InvalidParameter);
  EXPECT_THROW(edge_rescale_bound(1.0), InvalidParameter);
}

TEST(Estimates, EdgeRescale) {
  const auto b = edge_rescale_bound(0.19);
  EXPECT_NEAR(b.delta, 0.38 / 0.9, 1e-15);
  EXPECT_NEAR(b.resolvent, 0.76 / 0.9, 1e-15);
}

TEST(Estimates, ChainExponents) {
  const auto o = deltaprime_orders(-1.0, 0.05, 0.1);
  EXPECT_NEAR(o.exponent_product, 0.175, 1e-15);
  EXPECT_NEAR(o.exponent_Ct, -0.2, 1e-15);
  EXPECT_TRUE(o.valid);
  EXPECT_FALSE(deltaprime_orders(-1.0, 0.1, 0.1).valid);
}

TEST(Convergence, FitsPowerLaw) {
  const std::vector<double> x{0.2, 0.1, 0.05};
  std::vector<double> e;
  for (double v : x) e.push_back(3.0 * v * v);
  const auto f = fit_order(x, e);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.residual, 0.0, 1e-12);
  EXPECT_TRUE(order_at_least(f, 1.9));
  EXPECT_FALSE(order_at_least(fit_order({0.2, 0.1}, {0.04, 0.01}), 1.0));
  EXPECT_TRUE(strictly_decreasing({3, 2, 1}));
  EXPECT_FALSE(strictly_decreasing({3, 3, 1}));
}

TEST(ReportIo, EmptySweep) {
  const auto dir = fresh_dir("empty");
  CsvTable t{"eigenvalues", {"eps", "index", "fem"}, {}};
  LogLogPlot p{"errors", "t", "x", "y", {}};
  const auto paths = emit_outputs(nlohmann::json::object(), {t}, {p}, dir);
  EXPECT_EQ(slurp(dir / "eigenvalues.csv"), std::string(kCsvVersionLine) + "\neps,index,fem\n");
  EXPECT_FALSE(fs::exists(dir / "errors.svg"));
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  EXPECT_EQ(paths.size(), 2u);
}

TEST(ReportIo, ThreePointSweep) {
  const auto dir = fresh_dir("three");
  const std::vector<double> x{0.2, 0.1, 0.05};
  CsvTable t{"eigenvalues", {"eps", "index", "err"}, {}};
  const int m = 4;
  for (double e : x)
    for (long i = 0; i < m; ++i) t.rows.push_back({e, i, e * (i + 1)});
  std::vector<double> y{0.4, 0.2, 0.1};
  LogLogPlot p{"errors", "t", "eps", "err", {{"lambda_1", x, y, fit_order(x, y)}}};
  emit_outputs(nlohmann::json::object(), {t}, {p}, dir);
  const auto csv = slurp(dir / "eigenvalues.csv");
  EXPECT_EQ(count_of(csv, "\n"), 2 + 3 * m);
  const auto svg = slurp(dir / "errors.svg");
  EXPECT_EQ(count_of(svg, "<circle"), 3 + 1); // markers plus legend swatch
  EXPECT_GE(count_of(svg, "<line"), 1);
  EXPECT_NE(svg.find("slope"), std::string::npos);
}

TEST(ReportIo, WriteFailureNamesPath) {
  const fs::path bad = "/proc/graphtube_no_such_dir/x.csv";
  try {
    write_text(bad, "x");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos);
  }
}

TEST(ReportIo, ShortestDoubles) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e-300), "1e-300");
}

TEST(Experiments, ConfigParsing) {
  const auto c = config_from_json(ExperimentKind::ConvergeDelta, {{"q", -1}, {"eps", {0.2, 0.1, 0.05}}, {"seed", 7}});
  EXPECT_EQ(c.seed, 7u);
  EXPECT_DOUBLE_EQ(c.q, -1.0);
  EXPECT_THROW(config_from_json(ExperimentKind::ConvergeDelta, {{"bogus", 1}}), InvalidParameter);
  EXPECT_THROW(config_from_json(ExperimentKind::ConvergeDelta, {{"eps", {0.1, 0.2, 0.05}}}), InvalidParameter);
  EXPECT_THROW(config_from_json(ExperimentKind::ConvergeDelta, {{"eps", {0.2, 0.1}}}), InvalidParameter);
  EXPECT_THROW(config_from_json(ExperimentKind::ConvergeDelta, {{"h_factor", 2}}), InvalidParameter);
  EXPECT_THROW(config_from_json(ExperimentKind::ConvergeDeltaPrimeChain, {{"alpha", 0.1}}), InvalidParameter);
  EXPECT_THROW(config_from_json(ExperimentKind::Constants, {{"experiment", "noroot-scan"}}), InvalidParameter);
  EXPECT_EQ(parse_experiment_kind("noroot-scan"), ExperimentKind::NorootScan);
  EXPECT_FALSE(parse_experiment_kind("nope").has_value());
}

TEST(Experiments, CostGuard) {
  auto c = config_from_json(ExperimentKind::ConvergeDeltaPrimeChain,
                            {{"eps", {0.3, 0.2, 0.01}}, {"h_factor", 40}, {"region_factor", 40}});
  EXPECT_GT(projected_chain_dof(3, 0.01, 0.05, 40, 40), kMaxDof);
  EXPECT_THROW(run_experiment(c), ResourceLimit);
}

TEST(Experiments, NorootScanSmall) {
  const auto c = config_from_json(ExperimentKind::NorootScan, {{"a_points", 20}, {"kappa_points", 100}});
  const auto r = run_experiment(c);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.report["negative"], 2000);
}

TEST(Experiments, DeterministicOutputs) {
  const auto c = config_from_json(ExperimentKind::ConvergeDelta, {{"q", -1}, {"eps", {0.2, 0.15, 0.1}}, {"count", 2}});
  auto c2 = c;
  c2.threads = 3;
  const auto d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
  emit_outputs(run_experiment(c), d1);
  emit_outputs(run_experiment(c2), d2);
  for (const char* f : {"report.json", "eigenvalues.csv", "eigenvector.csv", "errors.svg"})
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
  EXPECT_EQ(count_of(slurp(d1 / "eigenvalues.csv"), "\n"), 2 + 3 * 2);
}
