#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "graphtube/coupling_maps.hpp"
#include "graphtube/error.hpp"
#include "graphtube/fatgraph_mesh.hpp"
#include "graphtube/manifold_fem.hpp"
#include "graphtube/sparse_eigen.hpp"

using namespace graphtube;

namespace {
constexpr double kPi2 = M_PI * M_PI;

FatGraphMesh star_mesh(int n, double eps) { return build_mesh(FatGraphSpec::unit_star(n, eps), MeshOptions{eps / 8}); }
} // namespace

TEST(SparseEigen, PathGraphLaplacian) {
  const int n = 50;
  std::vector<Eigen::Triplet<double>> ta, tm;
  for (int i = 0; i < n; ++i) {
    tm.emplace_back(i, i, 1.0);
    const double d = (i == 0 || i == n - 1) ? 1.0 : 2.0;
    ta.emplace_back(i, i, d);
    if (i + 1 < n) {
      ta.emplace_back(i, i + 1, -1.0);
      ta.emplace_back(i + 1, i, -1.0);
    }
  }
  SparseMatrix A(n, n), M(n, n);
  A.setFromTriplets(ta.begin(), ta.end());
  M.setFromTriplets(tm.begin(), tm.end());
  const auto r = shift_invert_eigs(A, M, 4);
  for (int k = 0; k < 4; ++k) {
    const double exact = 2.0 - 2.0 * std::cos(M_PI * k / n);
    EXPECT_NEAR(r.values[static_cast<std::size_t>(k)], exact, 1e-10);
  }
  EXPECT_EQ(count_eigenvalues_below(A, M, 0.01), 2);
}

TEST(Mesh, FatStarGeometry) {
  for (int n : {2, 3, 4}) {
    const auto m = star_mesh(n, 0.1);
    EXPECT_NEAR(m.total_area(), m.analytic_area(), 1e-12 * m.analytic_area()) << n;
    EXPECT_EQ(euler_characteristic(m), 1) << n;
    EXPECT_TRUE(is_connected(m));
    EXPECT_EQ(m.edge_count(), n);
  }
}

TEST(Mesh, RejectsCoarseStep) {
  EXPECT_THROW(build_mesh(FatGraphSpec::unit_star(3, 0.1), MeshOptions{0.05}), InvalidParameter);
}

TEST(Mesh, SatelliteLayout) {
  auto spec = FatGraphSpec::unit_star(3, 0.2);
  for (int e = 0; e < 3; ++e) spec.satellites.push_back({e, 0.9, 0.2});
  const auto m = build_mesh(spec, MeshOptions{0.025});
  EXPECT_NEAR(m.total_area(), m.analytic_area(), 1e-12);
  EXPECT_GT(m.region_area({RegionKind::Satellite, 0}), 0.0);

  auto bad = FatGraphSpec::unit_star(3, 0.2);
  bad.satellites.push_back({0, 1.5, 0.2});
  EXPECT_THROW(build_mesh(bad, MeshOptions{0.025}), GeometryError);
  auto overlap = FatGraphSpec::unit_star(3, 0.2);
  overlap.satellites.push_back({0, 0.5, 0.2});
  overlap.satellites.push_back({0, 0.6, 0.2});
  EXPECT_THROW(build_mesh(overlap, MeshOptions{0.025}), GeometryError);
}

TEST(Mesh, ExportHasCounts) {
  const auto m = build_rectangle_mesh(1.0, 0.1, 0.05);
  std::ostringstream os;
  export_mesh(m, os);
  EXPECT_NE(os.str().find(std::to_string(m.node_count())), std::string::npos);
}

TEST(Mesh, EdgeRescalingRoundTrip) {
  StripFunction u;
  u.stations = {0.0, 0.5, 1.0};
  u.transverse = {0.0, 0.1};
  u.values = Eigen::MatrixXd::Random(3, 2);
  const auto back = rescale_edge_map_inverse(rescale_edge_map(u, 0.2), 0.2);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(back.stations[i], u.stations[i], 1e-15);
  EXPECT_NEAR(rescale_edge_map(u, 0.2).norm_sq(), u.norm_sq() / 0.8, 1e-12);
}

TEST(Fem, RectangleSpectrum) {
  const auto sys = assemble(build_rectangle_mesh(1.0, 0.1, 0.0125), PotentialSpec::none());
  const auto r = eigensolve(sys, 5);
  EXPECT_NEAR(r.eigenvalues[0], 0.0, 1e-8);
  for (int k = 1; k < 5; ++k) EXPECT_NEAR(r.eigenvalues[static_cast<std::size_t>(k)] / (k * k * kPi2), 1.0, 5e-3);
}

TEST(Fem, DeltaPotentialValues) {
  const auto p = PotentialSpec::delta(-1.0, 0.1, 0.5);
  EXPECT_DOUBLE_EQ(p.vertex, -1.0 / (0.1 * 0.5));
  EXPECT_DOUBLE_EQ(p.min_value(), p.vertex);
  const auto c = PotentialSpec::deltaprime_chain(1.0, 0.05, 0.1, 0.5);
  EXPECT_NEAR(c.satellite, -std::pow(0.1, -1.05), 1e-12);
}

TEST(Fem, FatStarLowerAndUpperBounds) {
  const auto m = star_mesh(3, 0.1);
  const auto sys = assemble(m, PotentialSpec::delta(-1.0, 0.1, m.vertex.area));
  const auto c = lower_bound_check(sys, -7.111111111111111);
  EXPECT_TRUE(c.holds());
  EXPECT_NEAR(c.min_eigenvalue, -0.368594, 1e-5);
  EXPECT_NEAR(c.rayleigh_constant, -1.0 / (3.0 + 0.1 * m.vertex.area), 1e-12);
}

TEST(Fem, TemplateLambda2) {
  const auto d = vertex_region_data(build_vertex_region(3));
  EXPECT_NEAR(d.lambda2_v, 16.0 * kPi2 / 9.0, 2e-3);
  EXPECT_NEAR(d.c_vol, std::sqrt(3.0) / 12.0, 1e-12);
}

TEST(Fem, CooExport) {
  const auto sys = assemble(build_rectangle_mesh(1.0, 0.5, 0.5), PotentialSpec::none());
  std::ostringstream os;
  export_coo(sys.M, os);
  std::istringstream in(os.str());
  long r = 0, c = 0, nnz = 0;
  in >> r >> c >> nnz;
  EXPECT_EQ(r, sys.dof());
  EXPECT_EQ(nnz, sys.M.nonZeros());
}

TEST(Coupling, IdentificationIdentities) {
  const auto mesh = star_mesh(3, 0.1);
  const auto graph = build_unit_star(3, Delta{-1.0});
  const auto f = graph_function_on_mesh(mesh, graph, 1.0, [](int e, double s) { return std::cos(3 * s) + e * s * s; });
  const auto Jf = apply_J(f, mesh);
  EXPECT_NEAR(field_norm_sq(mesh, Jf), f.norm_sq(), 1e-8 * f.norm_sq());
  const auto back = apply_Jprime(Jf, mesh, graph);
  for (int e = 0; e < 3; ++e)
    for (std::size_t i = 0; i < f.values(e).size(); ++i) EXPECT_NEAR(back.values(e)[i], f.values(e)[i], 1e-10);
  const auto J1f = apply_J1(f, mesh);
  EXPECT_LT(port_jump(mesh, J1f), 1e-12);
}

TEST(Coupling, JprimeContraction) {
  const auto mesh = star_mesh(3, 0.1);
  const auto graph = build_unit_star(3, Delta{});
  Eigen::VectorXd u(static_cast<Eigen::Index>(mesh.node_count()));
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = std::sin(7.0 * mesh.nodes[static_cast<std::size_t>(i)].x()) + 0.3;
  const auto field = restrict_field(mesh, u);
  EXPECT_LE(apply_Jprime(field, mesh, graph).norm_sq(), field_norm_sq(mesh, field) * (1.0 + 1e-8));
}

TEST(Coupling, CutoffProfile) {
  const CutoffProfile chi{0.5};
  EXPECT_DOUBLE_EQ(chi.value(0.0), 1.0);
  EXPECT_DOUBLE_EQ(chi.value(0.25), 0.5);
  EXPECT_DOUBLE_EQ(chi.value(0.7), 0.0);
  EXPECT_DOUBLE_EQ(chi.norm_sq(), 0.5 / 3.0);
  EXPECT_DOUBLE_EQ(chi.derivative_norm_sq(), 2.0);
}

TEST(Coupling, ClosenessSuiteSmall) {
  ClosenessConfig cfg;
  cfg.samples = 10;
  cfg.q = -1.0;
  const auto r = closeness_suite(cfg);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.samples.size(), 10u);
}
