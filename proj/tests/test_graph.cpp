#include <cmath>

#include <gtest/gtest.h>

#include "graphtube/error.hpp"
#include "graphtube/fd_oracle.hpp"
#include "graphtube/graph_spectra.hpp"
#include "graphtube/metric_graph.hpp"
#include "graphtube/root_finding.hpp"

using namespace graphtube;

namespace {
constexpr double kPi2 = M_PI * M_PI;
}

TEST(MetricGraph, UnitStarQuantities) {
  const auto g = build_unit_star(3, Delta{-1.0});
  EXPECT_EQ(g.degree(), 3);
  EXPECT_DOUBLE_EQ(g.weight_norm_sq(), 3.0);
  EXPECT_DOUBLE_EQ(g.edge_volume(), 3.0);
  EXPECT_DOUBLE_EQ(g.ell0(), 1.0);
  EXPECT_TRUE(g.is_delta());
  EXPECT_DOUBLE_EQ(g.center_strength(), -1.0);
}

TEST(MetricGraph, JsonRoundTrip) {
  const auto g = build_unit_star(4, DeltaPrimeS{0.5});
  const auto back = graph_from_json(graph_to_json(g));
  EXPECT_EQ(back.degree(), 4);
  EXPECT_TRUE(back.is_delta_prime());
  EXPECT_DOUBLE_EQ(back.center_strength(), 0.5);
}

TEST(MetricGraph, RejectsBadInput) {
  EXPECT_THROW(build_unit_star(0, Delta{}), InvalidParameter);
  const std::vector<double> len{1.0, -1.0}, w{1.0, 1.0};
  EXPECT_THROW(build_star(2, len, w, Delta{}), InvalidParameter);
}

TEST(GraphFunction, ConstantNorms) {
  const auto g = build_unit_star(3, Delta{});
  const auto f = GraphFunction::sample(g, 0.01, [](int, double) { return 1.0; });
  EXPECT_NEAR(f.norm_sq(), 3.0, 1e-12);
  EXPECT_NEAR(f.derivative_norm_sq(), 0.0, 1e-12);
  EXPECT_NEAR(f.vertex_value(), 1.0, 1e-12);
  EXPECT_TRUE(f.in_weighted_space());
}

TEST(GraphFunction, TraceAndFormBounds) {
  const auto g = build_unit_star(3, Delta{-1.0});
  const auto f = GraphFunction::sample(g, 1e-3, [](int e, double s) { return std::cos(2.0 * s) + 0.1 * e * s * s; });
  EXPECT_TRUE(trace_bound_check(f, 0.5).holds());
  EXPECT_TRUE(form_bound_check(f, 0.5).holds());
}

TEST(RootFinding, Bisect) {
  EXPECT_NEAR(bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0), std::sqrt(2.0), 1e-14);
  const auto roots = find_roots([](double x) { return std::sin(x); }, scan_grid(10.0));
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[2], 3.0 * M_PI, 1e-12);
}

TEST(GraphSpectra, DeltaStarNegativeEigenvalue) {
  // 3 κ tanh κ = 1
  const auto s = star_delta_spectrum(-1.0, 3, 10.0);
  EXPECT_NEAR(s.eigenvalues[0], -0.3738751277819214, 1e-12);
  EXPECT_NEAR(s.eigenvalues[1], kPi2 / 4.0, 1e-12);
  EXPECT_EQ(s.multiplicities[1], 2);
}

TEST(GraphSpectra, KirchhoffStar) {
  const auto s = star_delta_spectrum(0.0, 3, 8.0);
  EXPECT_NEAR(s.eigenvalues[0], 0.0, 1e-14);
  EXPECT_NEAR(s.eigenvalues[1], kPi2 / 4.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues[3], kPi2, 1e-12);
}

TEST(GraphSpectra, DeltaPrimeKappa) {
  // κ tanh κ = 1 for β = −3, n = 3
  const auto k = solve_kappa_beta(-3.0, 3);
  ASSERT_TRUE(k.has_value());
  EXPECT_NEAR(std::tanh(*k), 1.0 / *k, 1e-14);
  EXPECT_NEAR(*k, 1.1996786402577338, 1e-12);
  EXPECT_FALSE(solve_kappa_beta(1.0, 3).has_value());
  const auto s = star_deltaprime_spectrum(-3.0, 3, 6.0);
  EXPECT_NEAR(s.eigenvalues[0], -(*k) * (*k), 1e-12);
  // λ = 0 with multiplicity n − 1
  EXPECT_NEAR(s.eigenvalues[1], 0.0, 1e-14);
  EXPECT_NEAR(s.eigenvalues[2], 0.0, 1e-14);
}

TEST(GraphSpectra, SecularMatchesFd) {
  for (double q : {0.0, -1.0, 2.0}) {
    const auto g = build_unit_star(4, Delta{q});
    const auto sec = secular_spectrum(g, 12.0).lowest(6);
    const auto fd = fd_oracle(g, 1e-3, 6).eigenvalues;
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(sec[i], fd[i], 1e-3) << "q=" << q << " i=" << i;
  }
}

TEST(GraphSpectra, VertexResidualSmallAtEigenvalue) {
  const auto g = build_unit_star(3, Delta{-1.0});
  const auto r = vertex_condition_residual(g, -0.3738751277819214);
  EXPECT_LT(std::abs(r.balance), 1e-10);
}

TEST(Intermediate, RayleighQuotient) {
  EXPECT_NEAR(rayleigh_constant_test(0.0, 0.1, 3), -10.0, 1e-12);
  EXPECT_NEAR(rayleigh_displayed_value(0.0, 0.1, 3), -10.0 / 3.0, 1e-12);
  EXPECT_NEAR(rayleigh_constant_test(-1.0, 0.1, 3), 100.0 / 3.0 - 10.0, 1e-10);
}

TEST(Intermediate, ZeroModeAndKappa) {
  const IntermediateParams p{-1.0, 0.1, 3};
  const auto s = intermediate_full_spectrum(p, 6.0);
  EXPECT_LT(s.eigenvalues[0], 0.0);
  EXPECT_NEAR(s.eigenvalues[1], 0.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues[2], 0.0, 1e-12);
  const auto neg = intermediate_negative_spectrum(p);
  ASSERT_EQ(neg.size(), 1u);
  EXPECT_NEAR(-neg[0].kappa * neg[0].kappa, s.eigenvalues[0], 1e-10);
}

TEST(Intermediate, MultiplicityBranchNegative) {
  for (double a : {0.01, 0.5, 1.0})
    for (double k : {0.1, 1.0, 10.0, 50.0}) EXPECT_LT(intermediate_multiplicity_branch(k, a), 0.0);
}

TEST(FdOracle, ResolventDifferenceShrinks) {
  const double d1 = fd_resolvent_difference({-1.0, 0.2, 3}, 0.01);
  const double d2 = fd_resolvent_difference({-1.0, 0.05, 3}, 0.01);
  EXPECT_GT(d1, d2);
}
