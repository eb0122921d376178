#include "graphtube/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "graphtube/error.hpp"
#include "graphtube/estimates.hpp"

namespace graphtube {

MetricGraph::MetricGraph(std::vector<Edge> edges, VertexCoupling center,
                         std::vector<PointInteraction> points)
    : edges_(std::move(edges)), center_(center), points_(std::move(points)) {
  if (edges_.size() < 2) throw InvalidParameter("star graph needs at least two edges");
  for (const auto& e : edges_) {
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      throw InvalidParameter("edge length must be finite and positive");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw InvalidParameter("edge weight must be finite and positive");
  }
  if (std::holds_alternative<FreeEnd>(center_))
    throw InvalidParameter("interior vertex needs a delta or delta-prime coupling");
  if (is_delta_prime()) {
    for (const auto& e : edges_)
      if (e.weight != 1.0) throw InvalidParameter("delta-prime coupling requires unit weights");
  }
  for (const auto& pt : points_) {
    if (pt.edge < 0 || pt.edge >= degree()) throw InvalidParameter("point interaction on unknown edge");
    const double len = edges_[static_cast<std::size_t>(pt.edge)].length;
    if (!(pt.position > 0.0) || !(pt.position < len))
      throw InvalidParameter("point interaction must lie strictly inside its edge");
  }
}

std::vector<double> MetricGraph::weights() const {
  std::vector<double> w;
  w.reserve(edges_.size());
  for (const auto& e : edges_) w.push_back(e.weight);
  return w;
}

std::vector<double> MetricGraph::lengths() const {
  std::vector<double> l;
  l.reserve(edges_.size());
  for (const auto& e : edges_) l.push_back(e.length);
  return l;
}

double MetricGraph::min_length() const {
  double m = edges_.front().length;
  for (const auto& e : edges_) m = std::min(m, e.length);
  return m;
}

double MetricGraph::ell0() const { return std::min(1.0, min_length()); }

double MetricGraph::weight_norm_sq() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.weight * e.weight;
  return s;
}

double MetricGraph::edge_volume() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.length * e.weight * e.weight;
  return s;
}

double MetricGraph::center_strength() const {
  if (const auto* d = std::get_if<Delta>(&center_)) return d->strength;
  if (const auto* d = std::get_if<DeltaPrimeS>(&center_)) return d->strength;
  return 0.0;
}

bool MetricGraph::is_uniform_unit() const {
  const double l = edges_.front().length;
  return std::all_of(edges_.begin(), edges_.end(),
                     [l](const Edge& e) { return e.length == l && e.weight == 1.0; });
}

MetricGraph build_star(int n, std::span<const double> lengths, std::span<const double> weights,
                       VertexCoupling coupling) {
  if (n < 2) throw InvalidParameter("star graph needs n >= 2");
  if (lengths.size() != static_cast<std::size_t>(n) || weights.size() != static_cast<std::size_t>(n))
    throw InvalidParameter("lengths and weights must have n entries");
  std::vector<Edge> edges;
  for (int e = 0; e < n; ++e)
    edges.push_back({lengths[static_cast<std::size_t>(e)], weights[static_cast<std::size_t>(e)]});
  return MetricGraph(std::move(edges), coupling);
}

MetricGraph build_unit_star(int n, VertexCoupling coupling) {
  if (n < 2) throw InvalidParameter("star graph needs n >= 2");
  std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
  return build_star(n, ones, ones, coupling);
}

MetricGraph graph_from_json(const nlohmann::json& doc) {
  if (!doc.contains("edges") || !doc["edges"].is_array())
    throw InvalidParameter("graph description needs an 'edges' array");
  std::vector<Edge> edges;
  for (const auto& e : doc["edges"]) {
    edges.push_back({e.value("length", 1.0), e.value("weight", 1.0)});
  }
  VertexCoupling coupling = Delta{0.0};
  if (doc.contains("coupling")) {
    const auto& c = doc["coupling"];
    const std::string type = c.value("type", "kirchhoff");
    const double strength = c.value("strength", 0.0);
    if (type == "delta")
      coupling = Delta{strength};
    else if (type == "delta_prime_s")
      coupling = DeltaPrimeS{strength};
    else if (type == "kirchhoff")
      coupling = Delta{0.0};
    else
      throw InvalidParameter("unknown coupling type '" + type + "'");
  }
  return MetricGraph(std::move(edges), coupling);
}

nlohmann::json graph_to_json(const MetricGraph& graph) {
  nlohmann::json doc;
  doc["edges"] = nlohmann::json::array();
  for (const auto& e : graph.edges()) doc["edges"].push_back({{"length", e.length}, {"weight", e.weight}});
  if (graph.is_delta_prime())
    doc["coupling"] = {{"type", "delta_prime_s"}, {"strength", graph.center_strength()}};
  else
    doc["coupling"] = {{"type", "delta"}, {"strength", graph.center_strength()}};
  return doc;
}

// ---------------------------------------------------------------------------

GraphFunction::GraphFunction(MetricGraph graph, std::vector<std::vector<double>> nodes,
                             std::vector<std::vector<double>> values)
    : graph_(std::move(graph)), nodes_(std::move(nodes)), values_(std::move(values)) {
  const auto n = static_cast<std::size_t>(graph_.degree());
  if (nodes_.size() != n || values_.size() != n)
    throw InvalidParameter("graph function needs one node list per edge");
  for (std::size_t e = 0; e < n; ++e) {
    const auto& x = nodes_[e];
    if (x.size() < 2 || x.size() != values_[e].size())
      throw InvalidParameter("edge grid needs at least two nodes and matching values");
    if (x.front() != 0.0 || std::abs(x.back() - graph_.edges()[e].length) > 1e-12 * x.back())
      throw InvalidParameter("edge grid must span [0, length]");
    for (std::size_t i = 1; i < x.size(); ++i)
      if (!(x[i] > x[i - 1])) throw InvalidParameter("edge grid must be increasing");
  }
}

std::vector<double> GraphFunction::uniform_nodes(double length, double h) {
  if (!(h > 0.0)) throw InvalidParameter("grid step must be positive");
  const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(length / h - 1e-9)));
  std::vector<double> x(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) x[i] = length * static_cast<double>(i) / static_cast<double>(cells);
  x.back() = length;
  return x;
}

GraphFunction GraphFunction::sample(const MetricGraph& graph, double h, const EdgeSampler& fn) {
  std::vector<std::vector<double>> nodes, values;
  for (int e = 0; e < graph.degree(); ++e) {
    auto x = uniform_nodes(graph.edge(e).length, h);
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = fn(e, x[i]);
    nodes.push_back(std::move(x));
    values.push_back(std::move(v));
  }
  return GraphFunction(graph, std::move(nodes), std::move(values));
}

GraphFunction GraphFunction::sample_weighted(const MetricGraph& graph, double h, double vertex_value,
                                             const EdgeSampler& fn) {
  const auto p = graph.weights();
  return sample(graph, h, [&](int e, double s) {
    if (s == 0.0) return vertex_value * p[static_cast<std::size_t>(e)];
    return vertex_value * p[static_cast<std::size_t>(e)] + fn(e, s) - fn(e, 0.0);
  });
}

double GraphFunction::max_step() const {
  double m = 0.0;
  for (const auto& x : nodes_)
    for (std::size_t i = 1; i < x.size(); ++i) m = std::max(m, x[i] - x[i - 1]);
  return m;
}

std::vector<double> GraphFunction::endpoint_vector() const {
  std::vector<double> ev;
  for (const auto& v : values_) ev.push_back(v.front());
  return ev;
}

double GraphFunction::vertex_value() const {
  const auto p = graph_.weights();
  const auto ev = endpoint_vector();
  return std::inner_product(ev.begin(), ev.end(), p.begin(), 0.0) / graph_.weight_norm_sq();
}

double GraphFunction::weighted_space_residual() const {
  const auto p = graph_.weights();
  const auto ev = endpoint_vector();
  const double fv = vertex_value();
  double res = 0.0, nrm = 0.0;
  for (std::size_t e = 0; e < ev.size(); ++e) {
    res += (ev[e] - fv * p[e]) * (ev[e] - fv * p[e]);
    nrm += ev[e] * ev[e];
  }
  if (nrm == 0.0) return 0.0;
  return std::sqrt(res / nrm);
}

bool GraphFunction::in_weighted_space(double tol) const { return weighted_space_residual() <= tol; }

double GraphFunction::evaluate(int e, double s) const {
  const auto& x = nodes(e);
  const auto& v = values(e);
  if (s <= x.front()) return v.front();
  if (s >= x.back()) return v.back();
  const auto it = std::upper_bound(x.begin(), x.end(), s);
  const auto i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double t = (s - x[i]) / (x[i + 1] - x[i]);
  return (1.0 - t) * v[i] + t * v[i + 1];
}

double GraphFunction::inner(const GraphFunction& other) const {
  double s = 0.0;
  for (int e = 0; e < edge_count(); ++e) {
    const auto& x = nodes(e);
    const auto& a = values(e);
    const auto& b = other.values(e);
    if (b.size() != a.size()) throw InvalidParameter("graph functions live on different grids");
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double h = x[i + 1] - x[i];
      s += h / 6.0 * (2.0 * a[i] * b[i] + a[i] * b[i + 1] + a[i + 1] * b[i] + 2.0 * a[i + 1] * b[i + 1]);
    }
  }
  return s;
}

double GraphFunction::derivative_inner(const GraphFunction& other) const {
  double s = 0.0;
  for (int e = 0; e < edge_count(); ++e) {
    const auto& x = nodes(e);
    const auto& a = values(e);
    const auto& b = other.values(e);
    if (b.size() != a.size()) throw InvalidParameter("graph functions live on different grids");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
      s += (a[i + 1] - a[i]) * (b[i + 1] - b[i]) / (x[i + 1] - x[i]);
  }
  return s;
}

double GraphFunction::norm_sq() const { return inner(*this); }
double GraphFunction::derivative_norm_sq() const { return derivative_inner(*this); }

InequalityCheck trace_bound_check(const GraphFunction& f, double a) {
  const auto& g = f.graph();
  if (!(a > 0.0) || a > g.min_length()) throw InvalidParameter("trace bound needs 0 < a <= min edge length");
  if (!f.in_weighted_space()) throw InvalidParameter("function is not in the weighted Sobolev space");
  const double fv = f.vertex_value();
  InequalityCheck out;
  out.lhs = fv * fv;
  out.rhs = (a * f.derivative_norm_sq() + 2.0 / a * f.norm_sq()) / g.weight_norm_sq();
  out.slack_constant = kDiscretisationSlack;
  out.tol_disc = kDiscretisationSlack * f.max_step();
  return out;
}

InequalityCheck form_bound_check(const GraphFunction& f, double eta) {
  const auto& g = f.graph();
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidParameter("form bound needs eta in (0,1)");
  if (!g.is_delta()) throw InvalidParameter("form bound needs a delta coupling");
  if (!f.in_weighted_space()) throw InvalidParameter("function is not in the weighted Sobolev space");
  const double q = g.center_strength();
  const double fv = f.vertex_value();
  InequalityCheck out;
  out.constant = delta_form_constant(q, g.weight_norm_sq(), g.min_length(), eta);
  out.lhs = std::abs(q) * fv * fv;
  out.rhs = eta * f.derivative_norm_sq() + out.constant * f.norm_sq();
  out.slack_constant = kDiscretisationSlack;
  out.tol_disc = kDiscretisationSlack * f.max_step();
  return out;
}

} // namespace graphtube
