#include "graphtube/graph_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/SVD>

#include "graphtube/error.hpp"
#include "graphtube/root_finding.hpp"

namespace graphtube {

namespace {

constexpr double kScanStep = 0.01;
constexpr double kScanSmallest = 1e-6;
constexpr double kZeroTol = 1e-12;

// Backward propagation of (f, f') over a distance len; negative λ is scaled
// by 1/cosh(κ len), which keeps signs.
void propagate(double& f, double& df, double len, double lambda) {
  if (lambda > 0.0) {
    const double k = std::sqrt(lambda);
    const double c = std::cos(k * len);
    const double s = std::sin(k * len);
    const double f0 = f * c - df * s / k;
    const double d0 = k * f * s + df * c;
    f = f0;
    df = d0;
  } else if (lambda < 0.0) {
    const double kappa = std::sqrt(-lambda);
    const double t = std::tanh(kappa * len);
    const double f0 = f - df * t / kappa;
    const double d0 = -kappa * f * t + df;
    f = f0;
    df = d0;
  } else {
    f -= df * len;
  }
  const double scale = std::max(std::abs(f), std::abs(df) / (1.0 + std::sqrt(std::abs(lambda))));
  if (scale > 0.0) {
    f /= scale;
    df /= scale;
  }
}

// Edge classes share length and point interactions, hence identical shots.
struct EdgeClass {
  double length = 1.0;
  std::vector<PointInteraction> points;
  std::vector<int> edges;
  double weight_sq = 0.0;
};

std::vector<EdgeClass> edge_classes(const MetricGraph& g) {
  std::vector<EdgeClass> classes;
  for (int e = 0; e < g.degree(); ++e) {
    std::vector<PointInteraction> pts;
    for (const auto& p : g.point_interactions())
      if (p.edge == e) pts.push_back(p);
    std::sort(pts.begin(), pts.end(),
              [](const PointInteraction& x, const PointInteraction& y) { return x.position > y.position; });
    auto same = [&](const EdgeClass& c) {
      if (c.length != g.edge(e).length || c.points.size() != pts.size()) return false;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (c.points[i].position != pts[i].position || c.points[i].strength != pts[i].strength) return false;
      return true;
    };
    auto it = std::find_if(classes.begin(), classes.end(), same);
    if (it == classes.end()) {
      classes.push_back({g.edge(e).length, pts, {}, 0.0});
      it = classes.end() - 1;
    }
    it->edges.push_back(e);
    it->weight_sq += g.edge(e).weight * g.edge(e).weight;
  }
  return classes;
}

std::vector<EdgeShot> shoot_classes(const std::vector<EdgeClass>& classes, double lambda) {
  std::vector<EdgeShot> shots;
  shots.reserve(classes.size());
  for (const auto& c : classes) shots.push_back(shoot_edge(c.length, c.points, lambda));
  return shots;
}

// Reduced determinant of the symmetric-within-class coupling system.
double reduced_determinant(const MetricGraph& g, const std::vector<EdgeClass>& classes,
                           const std::vector<EdgeShot>& shots) {
  const double strength = g.center_strength();
  const bool prime = g.is_delta_prime();
  double sum = 0.0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    double term = prime ? static_cast<double>(classes[i].edges.size()) * shots[i].u
                        : classes[i].weight_sq * shots[i].d;
    for (std::size_t j = 0; j < classes.size(); ++j)
      if (j != i) term *= prime ? shots[j].d : shots[j].u;
    sum += term;
  }
  double prod = strength;
  for (const auto& s : shots) prod *= prime ? s.d : s.u;
  return sum - prod;
}

double class_branch(const MetricGraph& g, const EdgeShot& s) { return g.is_delta_prime() ? s.d : s.u; }

double negative_scan_limit(const MetricGraph& g) {
  double s = 0.0;
  if (g.is_delta()) {
    s = std::abs(g.center_strength()) / g.weight_norm_sq();
  } else if (g.center_strength() < 0.0) {
    s = 1.5 * g.degree() / std::abs(g.center_strength()) + 1.0;
  }
  double seg = g.min_length();
  for (const auto& p : g.point_interactions()) {
    s += std::abs(p.strength);
    seg = std::min({seg, p.position, g.edge(p.edge).length - p.position});
  }
  return 10.0 + 4.0 * (s + std::sqrt(s / seg));
}

void check_boundary(const std::vector<double>& roots, const std::vector<double>& grid, const char* what) {
  if (roots.empty() || grid.size() < 2) return;
  if (roots.back() >= grid[grid.size() - 2]) {
    std::ostringstream os;
    os << what << ": root " << roots.back() << " at the scan boundary " << grid.back()
       << "; widen the scan range";
    throw SolverFailure(os.str());
  }
}

void append(std::vector<double>& out, double lambda, int mult) {
  for (int i = 0; i < mult; ++i) out.push_back(lambda);
}

} // namespace

void IntermediateParams::validate() const {
  if (n < 2) throw InvalidParameter("intermediate Hamiltonian needs n >= 2");
  if (!(a > 0.0 && a < 1.0)) throw InvalidParameter("intermediate Hamiltonian needs 0 < a < 1");
  if (!std::isfinite(beta)) throw InvalidParameter("beta must be finite");
}

EdgeShot shoot_edge(double length, const std::vector<PointInteraction>& points, double lambda) {
  std::vector<PointInteraction> pts = points;
  std::sort(pts.begin(), pts.end(),
            [](const PointInteraction& x, const PointInteraction& y) { return x.position > y.position; });
  double f = 1.0, df = 0.0, pos = length;
  for (const auto& p : pts) {
    propagate(f, df, pos - p.position, lambda);
    df -= p.strength * f;
    pos = p.position;
  }
  propagate(f, df, pos, lambda);
  return {f, df};
}

std::optional<double> solve_kappa_beta(double beta, int n) {
  if (n < 2) throw InvalidParameter("solve_kappa_beta needs n >= 2");
  if (beta >= 0.0) return std::nullopt;
  const auto g = [&](double kappa) { return 1.0 + beta * kappa / n * std::tanh(kappa); };
  double hi = 1.0;
  while (g(hi) > 0.0) hi *= 2.0;
  return bisect(g, 0.0, hi, 1e-16);
}

SpectralResult secular_spectrum(const MetricGraph& g, double k_max) {
  if (!(k_max > 0.0)) throw InvalidParameter("k_max must be positive");
  const auto classes = edge_classes(g);
  const bool prime = g.is_delta_prime();
  std::vector<double> values;

  auto det_at = [&](double lambda) { return reduced_determinant(g, classes, shoot_classes(classes, lambda)); };

  // λ = 0
  {
    const auto shots = shoot_classes(classes, 0.0);
    if (std::abs(reduced_determinant(g, classes, shots)) <= kZeroTol * std::max(1.0, std::abs(g.center_strength())))
      append(values, 0.0, 1);
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i].edges.size() > 1 && std::abs(class_branch(g, shots[i])) <= kZeroTol)
        append(values, 0.0, static_cast<int>(classes[i].edges.size()) - 1);
  }

  const auto kgrid = scan_grid(k_max, kScanStep, 60, kScanSmallest);
  const double kappa_max = negative_scan_limit(g);
  const auto ngrid = scan_grid(kappa_max, kScanStep, 60, kScanSmallest);

  // positive and negative halves of the reduced determinant
  for (double k : merge_close(find_roots([&](double k) { return det_at(k * k); }, kgrid), 1e-12))
    append(values, k * k, 1);
  {
    auto roots = merge_close(find_roots([&](double kap) { return det_at(-kap * kap); }, ngrid), 1e-12);
    check_boundary(roots, ngrid, "negative spectrum");
    for (double kap : roots) append(values, -kap * kap, 1);
  }

  // within-class antisymmetric branches
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const int mult = static_cast<int>(classes[i].edges.size()) - 1;
    if (mult < 1) continue;
    const auto& cls = classes[i];
    auto branch = [&](double lambda) {
      const auto s = shoot_edge(cls.length, cls.points, lambda);
      return prime ? s.d : s.u;
    };
    for (double k : merge_close(find_roots([&](double k) { return branch(k * k); }, kgrid), 1e-12))
      append(values, k * k, mult);
    auto roots = merge_close(find_roots([&](double kap) { return branch(-kap * kap); }, ngrid), 1e-12);
    check_boundary(roots, ngrid, "negative spectrum");
    for (double kap : roots) append(values, -kap * kap, mult);
  }

  return SpectralResult::from_values(std::move(values), ModelTag::Graph, SolverTag::Secular);
}

SpectralResult star_delta_spectrum(double q, int n, double k_max) {
  return secular_spectrum(build_unit_star(n, Delta{q}), k_max);
}

SpectralResult star_deltaprime_spectrum(double beta, int n, double k_max) {
  return secular_spectrum(build_unit_star(n, DeltaPrimeS{beta}), k_max);
}

MetricGraph intermediate_graph(const IntermediateParams& params) {
  params.validate();
  std::vector<Edge> edges(static_cast<std::size_t>(params.n), Edge{1.0, 1.0});
  std::vector<PointInteraction> points;
  for (int e = 0; e < params.n; ++e) points.push_back({e, params.a, params.c()});
  return MetricGraph(std::move(edges), Delta{params.b()}, std::move(points));
}

double intermediate_symmetric_branch(double kappa, const IntermediateParams& p) {
  const double ta = std::tanh(kappa * p.a);
  const double tb = std::tanh(kappa * (1.0 - p.a));
  return p.beta / (p.a * p.a) * (ta - p.a * kappa * (1.0 + ta * tb)) +
         p.n * kappa * (kappa * p.a * (ta + tb) - 1.0);
}

double intermediate_multiplicity_branch(double kappa, double a) {
  return std::sinh(kappa * a) * std::cosh(kappa * (1.0 - a)) - kappa * a * std::cosh(kappa);
}

double intermediate_multiplicity_branch_scaled(double kappa, double a) {
  const double ta = std::tanh(kappa * a);
  const double tb = std::tanh(kappa * (1.0 - a));
  return ta - kappa * a * (1.0 + ta * tb);
}

std::vector<KappaRoot> intermediate_negative_spectrum(const IntermediateParams& params) {
  params.validate();
  const double s = std::abs(params.beta) / (params.n * params.a * params.a) + 1.0 / params.a;
  const double kappa_max = 10.0 + 4.0 * (s + std::sqrt(s / params.a));
  const auto grid = scan_grid(kappa_max, kScanStep, 60, kScanSmallest);

  std::vector<KappaRoot> out;
  auto sym = merge_close(
      find_roots([&](double k) { return intermediate_symmetric_branch(k, params); }, grid), 1e-12);
  check_boundary(sym, grid, "intermediate symmetric branch");
  for (double k : sym) out.push_back({k, 1});
  auto multi = merge_close(
      find_roots([&](double k) { return intermediate_multiplicity_branch_scaled(k, params.a); }, grid), 1e-12);
  check_boundary(multi, grid, "intermediate multiplicity branch");
  for (double k : multi) out.push_back({k, params.n - 1});
  std::sort(out.begin(), out.end(), [](const KappaRoot& x, const KappaRoot& y) { return x.kappa > y.kappa; });
  return out;
}

SpectralResult intermediate_full_spectrum(const IntermediateParams& params, double k_max) {
  const auto full = secular_spectrum(intermediate_graph(params), k_max);
  std::vector<double> values;
  for (double v : full.eigenvalues)
    if (v >= 0.0) values.push_back(v);
  for (const auto& r : intermediate_negative_spectrum(params)) append(values, -r.kappa * r.kappa, r.multiplicity);
  return SpectralResult::from_values(std::move(values), ModelTag::Graph, SolverTag::Secular);
}

double rayleigh_constant_test(double beta, double a, int n) {
  IntermediateParams p{beta, a, n};
  const auto g = intermediate_graph(p);
  // f = 1: no kinetic energy, f(0) = 1 and f_e(a) = 1
  double form = p.b();
  for (const auto& pt : g.point_interactions()) form += pt.strength;
  double norm_sq = 0.0;
  for (const auto& e : g.edges()) norm_sq += e.length * e.weight * e.weight;
  return form / norm_sq;
}

double rayleigh_displayed_value(double beta, double a, int n) {
  return -(beta / (a * a) + 1.0 / a) / static_cast<double>(n);
}

VertexResidual vertex_condition_residual(const MetricGraph& g, double lambda) {
  const int n = g.degree();
  const auto p = g.weights();
  const double strength = g.center_strength();
  const bool prime = g.is_delta_prime();
  std::vector<EdgeShot> shots;
  for (int e = 0; e < n; ++e) {
    std::vector<PointInteraction> pts;
    for (const auto& pt : g.point_interactions())
      if (pt.edge == e) pts.push_back(pt);
    auto s = shoot_edge(g.edge(e).length, pts, lambda);
    const double nrm = std::hypot(s.u, s.d / (1.0 + std::sqrt(std::abs(lambda))));
    shots.push_back({s.u / nrm, s.d / nrm});
  }
  // unknowns: edge amplitudes A_e, then the vertex value F (δ) or common derivative D (δ′ₛ)
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int e = 0; e < n; ++e) {
    const auto i = static_cast<Eigen::Index>(e);
    if (prime) {
      m(i, i) = shots[static_cast<std::size_t>(e)].d;
      m(i, n) = -1.0;
      m(n, i) = shots[static_cast<std::size_t>(e)].u;
    } else {
      m(i, i) = shots[static_cast<std::size_t>(e)].u;
      m(i, n) = -p[static_cast<std::size_t>(e)];
      m(n, i) = p[static_cast<std::size_t>(e)] * shots[static_cast<std::size_t>(e)].d;
    }
  }
  m(n, n) = -strength;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd x = svd.matrixV().col(n);
  const Eigen::VectorXd r = m * x;
  VertexResidual out;
  out.continuity = r.head(n).cwiseAbs().maxCoeff();
  out.balance = std::abs(r(n));
  return out;
}

} // namespace graphtube
