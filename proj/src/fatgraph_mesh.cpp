#include "graphtube/fatgraph_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "graphtube/error.hpp"

namespace graphtube {

Eigen::Vector2d VertexTemplate::outward_normal(int side) const {
  const auto& a = corners[static_cast<std::size_t>(side)];
  const auto& b = corners[static_cast<std::size_t>((side + 1) % sides())];
  const Eigen::Vector2d t = (b - a).normalized();
  return {t.y(), -t.x()};
}

double VertexTemplate::apothem() const {
  const auto& a = corners[0];
  const auto& b = corners[1];
  return std::abs(outward_normal(0).dot(0.5 * (a + b)));
}

VertexTemplate build_vertex_region(int n, double port_length) {
  if (n < 2) throw InvalidParameter("vertex region needs n >= 2");
  if (!(port_length > 0.0)) throw InvalidParameter("port length must be positive");
  VertexTemplate t;
  t.n = n;
  t.port_length = port_length;
  const int sides = n == 2 ? 4 : n;
  const double radius = port_length / (2.0 * std::sin(M_PI / sides));
  // side k has outward normal at angle 2πk/sides
  for (int k = 0; k < sides; ++k) {
    const double phi = 2.0 * M_PI * k / sides - M_PI / sides;
    t.corners.emplace_back(radius * std::cos(phi), radius * std::sin(phi));
  }
  if (n == 2) {
    t.port_side = {0, 2};
  } else {
    t.port_side.resize(static_cast<std::size_t>(n));
    std::iota(t.port_side.begin(), t.port_side.end(), 0);
  }
  const double apothem = port_length / (2.0 * std::tan(M_PI / sides));
  t.area = 0.5 * sides * port_length * apothem;
  t.port_total = n * port_length;
  t.collar_depth = 0.5 * port_length;
  return t;
}

FatGraphSpec FatGraphSpec::unit_star(int n, double eps) {
  FatGraphSpec s;
  s.n = n;
  s.lengths.assign(static_cast<std::size_t>(n), 1.0);
  s.eps = eps;
  return s;
}

std::string to_string(const RegionTag& tag) {
  switch (tag.kind) {
  case RegionKind::Edge: return "edge:" + std::to_string(tag.index);
  case RegionKind::Vertex: return "vertex";
  case RegionKind::Satellite: return "satellite:" + std::to_string(tag.index);
  }
  return "unknown";
}

double FatGraphMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Eigen::Vector2d a = nodes[static_cast<std::size_t>(tri[1])] - nodes[static_cast<std::size_t>(tri[0])];
  const Eigen::Vector2d b = nodes[static_cast<std::size_t>(tri[2])] - nodes[static_cast<std::size_t>(tri[0])];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double FatGraphMesh::total_area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) s += triangle_area(t);
  return s;
}

double FatGraphMesh::region_area(const RegionTag& tag) const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t)
    if (region[t] == tag) s += triangle_area(t);
  return s;
}

double FatGraphMesh::analytic_area() const {
  const double eps = spec.eps;
  double a = eps * eps * vertex.area;
  for (const auto& s : strips) a += s.length * s.width;
  return a;
}

int FatGraphMesh::edge_count() const { return static_cast<int>(strips.size()); }

namespace {

class MeshBuilder {
public:
  explicit MeshBuilder(FatGraphMesh& mesh) : mesh_(mesh) {}

  int add_node(const Eigen::Vector2d& x) {
    mesh_.nodes.push_back(x);
    return static_cast<int>(mesh_.nodes.size()) - 1;
  }

  void add_triangle(int a, int b, int c, RegionTag tag) {
    std::array<int, 3> tri{a, b, c};
    const Eigen::Vector2d u = mesh_.nodes[static_cast<std::size_t>(b)] - mesh_.nodes[static_cast<std::size_t>(a)];
    const Eigen::Vector2d v = mesh_.nodes[static_cast<std::size_t>(c)] - mesh_.nodes[static_cast<std::size_t>(a)];
    const double area = 0.5 * (u.x() * v.y() - u.y() * v.x());
    if (area < 0.0) std::swap(tri[1], tri[2]);
    if (std::abs(area) <= 0.0) throw GeometryError("degenerate triangle while meshing");
    mesh_.triangles.push_back(tri);
    mesh_.region.push_back(tag);
  }

  // Refined polygon: each centre triangle (0, c_k, c_{k+1}) split m×m.
  // Returns side nodes T[k][j], j = 0..m from c_k to c_{k+1}.
  std::vector<std::vector<int>> polygon(const VertexTemplate& vt, int m, double scale) {
    const int sides = vt.sides();
    const int centre = add_node(Eigen::Vector2d::Zero());
    std::vector<std::vector<int>> spoke(static_cast<std::size_t>(sides), std::vector<int>(static_cast<std::size_t>(m + 1)));
    for (int k = 0; k < sides; ++k) {
      spoke[static_cast<std::size_t>(k)][0] = centre;
      for (int i = 1; i <= m; ++i)
        spoke[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
            add_node(scale * (static_cast<double>(i) / m) * vt.corners[static_cast<std::size_t>(k)]);
    }
    std::vector<std::vector<int>> side(static_cast<std::size_t>(sides), std::vector<int>(static_cast<std::size_t>(m + 1)));
    for (int k = 0; k < sides; ++k) {
      const int k1 = (k + 1) % sides;
      const Eigen::Vector2d& ck = vt.corners[static_cast<std::size_t>(k)];
      const Eigen::Vector2d& ck1 = vt.corners[static_cast<std::size_t>(k1)];
      // node index on the local barycentric grid P(i, j) = (i/m) c_k + (j/m) c_{k+1}
      std::map<std::pair<int, int>, int> local;
      auto at = [&](int i, int j) -> int {
        if (i == 0 && j == 0) return centre;
        if (j == 0) return spoke[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        if (i == 0) return spoke[static_cast<std::size_t>(k1)][static_cast<std::size_t>(j)];
        auto key = std::make_pair(i, j);
        if (auto it = local.find(key); it != local.end()) return it->second;
        const int id = add_node(scale * ((static_cast<double>(i) / m) * ck + (static_cast<double>(j) / m) * ck1));
        local[key] = id;
        return id;
      };
      for (int j = 0; j <= m; ++j) side[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = at(m - j, j);
      for (int i = 0; i < m; ++i)
        for (int j = 0; i + j < m; ++j) {
          add_triangle(at(i, j), at(i + 1, j), at(i, j + 1), {RegionKind::Vertex, 0});
          if (i + j + 1 < m) add_triangle(at(i + 1, j), at(i + 1, j + 1), at(i, j + 1), {RegionKind::Vertex, 0});
        }
    }
    return side;
  }

private:
  FatGraphMesh& mesh_;
};

std::vector<double> station_grid(double length, double h, double h_region, const std::vector<Satellite>& sats,
                                 std::vector<bool>& in_sat) {
  std::vector<std::pair<double, bool>> pieces; // (end, satellite)
  for (const auto& s : sats) {
    pieces.emplace_back(s.position, false);
    pieces.emplace_back(s.position + s.length, true);
  }
  pieces.emplace_back(length, false);
  std::vector<double> x{0.0};
  in_sat.clear();
  double lo = 0.0;
  for (const auto& [hi, sat] : pieces) {
    if (hi <= lo) continue;
    const double step = sat ? h_region : h;
    const auto cells = static_cast<long>(std::max(1.0, std::ceil((hi - lo) / step - 1e-9)));
    for (long i = 1; i <= cells; ++i) {
      x.push_back(i == cells ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells));
      in_sat.push_back(sat);
    }
    lo = hi;
  }
  return x;
}

} // namespace

FatGraphMesh build_template_mesh(const VertexTemplate& vertex, int m, double scale) {
  if (m < 1) throw InvalidParameter("template mesh needs m >= 1");
  FatGraphMesh mesh;
  mesh.vertex = vertex;
  mesh.spec.n = vertex.n;
  mesh.spec.eps = scale;
  mesh.h = scale * vertex.port_length / m;
  MeshBuilder b(mesh);
  const auto side = b.polygon(vertex, m, scale);
  for (int k = 0; k < vertex.sides(); ++k)
    for (int j = 0; j < m; ++j)
      mesh.boundary.push_back({side[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)],
                               side[static_cast<std::size_t>(k)][static_cast<std::size_t>(j + 1)],
                               BoundaryKind::VertexWall, -1});
  mesh.vertex_nodes.resize(mesh.nodes.size());
  std::iota(mesh.vertex_nodes.begin(), mesh.vertex_nodes.end(), 0);
  return mesh;
}

FatGraphMesh build_rectangle_mesh(double lx, double ly, double h) {
  if (!(lx > 0.0) || !(ly > 0.0) || !(h > 0.0)) throw InvalidParameter("rectangle mesh needs positive sizes");
  FatGraphMesh mesh;
  mesh.h = h;
  mesh.spec.n = 1;
  mesh.spec.lengths = {lx};
  mesh.spec.eps = ly;
  MeshBuilder b(mesh);
  StripGrid g;
  g.length = lx;
  g.width = ly;
  const auto nx = static_cast<int>(std::max(1.0, std::ceil(lx / h - 1e-9)));
  const auto ny = static_cast<int>(std::max(1.0, std::ceil(ly / h - 1e-9)));
  for (int i = 0; i <= nx; ++i) g.stations.push_back(i == nx ? lx : lx * i / nx);
  for (int j = 0; j <= ny; ++j) g.transverse.push_back(j == ny ? ly : ly * j / ny);
  g.graph_position = g.stations;
  g.in_satellite.assign(static_cast<std::size_t>(nx), false);
  g.node.assign(g.stations.size(), std::vector<int>(g.transverse.size()));
  for (std::size_t i = 0; i < g.stations.size(); ++i)
    for (std::size_t j = 0; j < g.transverse.size(); ++j)
      g.node[i][j] = b.add_node({g.stations[i], g.transverse[j]});
  for (std::size_t i = 0; i + 1 < g.stations.size(); ++i)
    for (std::size_t j = 0; j + 1 < g.transverse.size(); ++j) {
      b.add_triangle(g.node[i][j], g.node[i + 1][j], g.node[i][j + 1], {RegionKind::Edge, 0});
      b.add_triangle(g.node[i + 1][j], g.node[i + 1][j + 1], g.node[i][j + 1], {RegionKind::Edge, 0});
    }
  mesh.strips.push_back(std::move(g));
  return mesh;
}

FatGraphMesh build_mesh(const FatGraphSpec& spec, const MeshOptions& opt, const VertexTemplate* vertex) {
  if (spec.n < 2) throw InvalidParameter("fat graph needs n >= 2");
  if (spec.lengths.size() != static_cast<std::size_t>(spec.n)) throw InvalidParameter("need one length per edge");
  for (double l : spec.lengths)
    if (!(l > 0.0) || !std::isfinite(l)) throw InvalidParameter("edge lengths must be finite and positive");
  if (!(spec.eps > 0.0)) throw InvalidParameter("eps must be positive");
  if (!(spec.cross_section > 0.0)) throw InvalidParameter("cross-section must be positive");
  const double h = opt.h;
  const double hr = std::isnan(opt.h_region) ? h : opt.h_region;
  if (!(h > 0.0) || !(hr > 0.0)) throw InvalidParameter("mesh step must be positive");
  if (h > spec.eps / 4.0 * (1.0 + 1e-12)) throw InvalidParameter("mesh step must satisfy h <= eps/4");

  std::vector<std::vector<Satellite>> sats(static_cast<std::size_t>(spec.n));
  for (const auto& s : spec.satellites) {
    if (s.edge < 0 || s.edge >= spec.n) throw InvalidParameter("satellite on unknown edge");
    if (!(s.length > 0.0)) throw InvalidParameter("satellite length must be positive");
    if (s.position < s.length) {
      std::ostringstream os;
      os << "satellite at a = " << s.position << " overlaps the central vertex region (needs a >= eps = "
         << s.length << ")";
      throw GeometryError(os.str());
    }
    if (s.position >= spec.lengths[static_cast<std::size_t>(s.edge)])
      throw GeometryError("satellite position must lie inside its edge");
    sats[static_cast<std::size_t>(s.edge)].push_back(s);
  }
  for (auto& list : sats) {
    std::sort(list.begin(), list.end(), [](const Satellite& a, const Satellite& b) { return a.position < b.position; });
    for (std::size_t i = 1; i < list.size(); ++i)
      if (list[i].position < list[i - 1].position + list[i - 1].length)
        throw GeometryError("satellite regions overlap");
  }

  FatGraphMesh mesh;
  mesh.spec = spec;
  mesh.h = std::max(h, hr);
  mesh.vertex = vertex ? *vertex : build_vertex_region(spec.n, spec.cross_section);
  if (mesh.vertex.n != spec.n) throw InvalidParameter("vertex template has the wrong degree");
  const double eps = spec.eps;
  const double width = eps * mesh.vertex.port_length;
  const int m = static_cast<int>(std::max(1.0, std::ceil(width / std::min(h, hr) - 1e-9)));

  MeshBuilder b(mesh);
  const auto side = b.polygon(mesh.vertex, m, eps);
  mesh.vertex_nodes.resize(mesh.nodes.size());
  std::iota(mesh.vertex_nodes.begin(), mesh.vertex_nodes.end(), 0);

  std::set<int> port_sides(mesh.vertex.port_side.begin(), mesh.vertex.port_side.end());
  for (int k = 0; k < mesh.vertex.sides(); ++k) {
    if (port_sides.count(k)) continue;
    for (int j = 0; j < m; ++j)
      mesh.boundary.push_back({side[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)],
                               side[static_cast<std::size_t>(k)][static_cast<std::size_t>(j + 1)],
                               BoundaryKind::VertexWall, -1});
  }

  for (int e = 0; e < spec.n; ++e) {
    const auto& es = sats[static_cast<std::size_t>(e)];
    StripGrid g;
    g.edge = e;
    g.width = width;
    g.length = spec.lengths[static_cast<std::size_t>(e)];
    for (const auto& s : es) g.length += s.length;
    g.stations = station_grid(g.length, h, hr, es, g.in_satellite);
    for (int j = 0; j <= m; ++j) g.transverse.push_back(width * j / m);
    g.transverse.back() = width;

    for (double s : g.stations) {
      double pos = s;
      for (const auto& sat : es) {
        if (s >= sat.position + sat.length) pos -= sat.length;
        else if (s > sat.position) pos -= s - sat.position;
      }
      g.graph_position.push_back(pos);
    }

    const int k = mesh.vertex.port_side[static_cast<std::size_t>(e)];
    const Eigen::Vector2d c0 = eps * mesh.vertex.corners[static_cast<std::size_t>(k)];
    const Eigen::Vector2d c1 = eps * mesh.vertex.corners[static_cast<std::size_t>((k + 1) % mesh.vertex.sides())];
    const Eigen::Vector2d nu = mesh.vertex.outward_normal(k);
    g.node.assign(g.stations.size(), std::vector<int>(static_cast<std::size_t>(m + 1)));
    for (int j = 0; j <= m; ++j) g.node[0][static_cast<std::size_t>(j)] = side[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
    for (std::size_t i = 1; i < g.stations.size(); ++i)
      for (int j = 0; j <= m; ++j) {
        const double t = static_cast<double>(j) / m;
        g.node[i][static_cast<std::size_t>(j)] = b.add_node((1.0 - t) * c0 + t * c1 + g.stations[i] * nu);
      }
    for (std::size_t i = 0; i + 1 < g.stations.size(); ++i) {
      const RegionTag tag = g.in_satellite[i] ? RegionTag{RegionKind::Satellite, e} : RegionTag{RegionKind::Edge, e};
      for (int j = 0; j < m; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const int A = g.node[i][ju], B = g.node[i + 1][ju], C = g.node[i + 1][ju + 1], D = g.node[i][ju + 1];
        b.add_triangle(A, B, D, tag);
        b.add_triangle(B, C, D, tag);
      }
    }
    for (std::size_t i = 0; i + 1 < g.stations.size(); ++i) {
      mesh.boundary.push_back({g.node[i][0], g.node[i + 1][0], BoundaryKind::Lateral, e});
      mesh.boundary.push_back({g.node[i][static_cast<std::size_t>(m)], g.node[i + 1][static_cast<std::size_t>(m)],
                               BoundaryKind::Lateral, e});
    }
    for (int j = 0; j < m; ++j)
      mesh.boundary.push_back({g.node.back()[static_cast<std::size_t>(j)], g.node.back()[static_cast<std::size_t>(j + 1)],
                               BoundaryKind::End, e});
    mesh.strips.push_back(std::move(g));
  }
  return mesh;
}

bool is_connected(const FatGraphMesh& mesh) {
  const std::size_t n = mesh.nodes.size();
  if (n == 0) return false;
  std::vector<std::vector<int>> adj(n);
  for (const auto& t : mesh.triangles)
    for (int a = 0; a < 3; ++a) {
      adj[static_cast<std::size_t>(t[static_cast<std::size_t>(a)])].push_back(t[static_cast<std::size_t>((a + 1) % 3)]);
      adj[static_cast<std::size_t>(t[static_cast<std::size_t>((a + 1) % 3)])].push_back(t[static_cast<std::size_t>(a)]);
    }
  std::vector<bool> seen(n, false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w : adj[static_cast<std::size_t>(v)])
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        ++count;
        q.push(w);
      }
  }
  return count == n;
}

long euler_characteristic(const FatGraphMesh& mesh) {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : mesh.triangles)
    for (int a = 0; a < 3; ++a) {
      int u = t[static_cast<std::size_t>(a)], v = t[static_cast<std::size_t>((a + 1) % 3)];
      if (u > v) std::swap(u, v);
      edges.emplace(u, v);
    }
  return static_cast<long>(mesh.nodes.size()) - static_cast<long>(edges.size()) +
         static_cast<long>(mesh.triangles.size());
}

void export_mesh(const FatGraphMesh& mesh, std::ostream& os) {
  os << "# graphtube mesh v1: nodes " << mesh.nodes.size() << " triangles " << mesh.triangles.size()
     << " boundary " << mesh.boundary.size() << "\n";
  os.precision(17);
  os << "nodes " << mesh.nodes.size() << "\n";
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    os << i << " " << mesh.nodes[i].x() << " " << mesh.nodes[i].y() << "\n";
  os << "triangles " << mesh.triangles.size() << "\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    os << t << " " << mesh.triangles[t][0] << " " << mesh.triangles[t][1] << " " << mesh.triangles[t][2] << " "
       << to_string(mesh.region[t]) << "\n";
  os << "boundary " << mesh.boundary.size() << "\n";
  for (std::size_t i = 0; i < mesh.boundary.size(); ++i) {
    const auto& s = mesh.boundary[i];
    const char* kind = s.kind == BoundaryKind::Lateral ? "lateral" : s.kind == BoundaryKind::End ? "end" : "wall";
    os << i << " " << s.a << " " << s.b << " " << kind << " " << s.edge << "\n";
  }
}

double StripFunction::norm_sq() const {
  double sum = 0.0;
  const auto& u = values;
  for (std::size_t i = 0; i + 1 < stations.size(); ++i)
    for (std::size_t j = 0; j + 1 < transverse.size(); ++j) {
      const double area = 0.5 * (stations[i + 1] - stations[i]) * (transverse[j + 1] - transverse[j]);
      const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
      auto tri = [&](double a, double b, double c) { return area / 6.0 * (a * a + b * b + c * c + a * b + b * c + a * c); };
      sum += tri(u(I, J), u(I + 1, J), u(I, J + 1));
      sum += tri(u(I + 1, J), u(I + 1, J + 1), u(I, J + 1));
    }
  return sum;
}

double StripFunction::energy_s() const {
  double sum = 0.0;
  const auto& u = values;
  for (std::size_t i = 0; i + 1 < stations.size(); ++i)
    for (std::size_t j = 0; j + 1 < transverse.size(); ++j) {
      const double hs = stations[i + 1] - stations[i], hy = transverse[j + 1] - transverse[j];
      const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
      const double d1 = (u(I + 1, J) - u(I, J)) / hs;
      const double d2 = (u(I + 1, J + 1) - u(I, J + 1)) / hs;
      sum += 0.5 * hs * hy * (d1 * d1 + d2 * d2);
    }
  return sum;
}

double StripFunction::energy_y() const {
  double sum = 0.0;
  const auto& u = values;
  for (std::size_t i = 0; i + 1 < stations.size(); ++i)
    for (std::size_t j = 0; j + 1 < transverse.size(); ++j) {
      const double hs = stations[i + 1] - stations[i], hy = transverse[j + 1] - transverse[j];
      const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
      const double d1 = (u(I, J + 1) - u(I, J)) / hy;
      const double d2 = (u(I + 1, J + 1) - u(I + 1, J)) / hy;
      sum += 0.5 * hs * hy * (d1 * d1 + d2 * d2);
    }
  return sum;
}

StripFunction rescale_edge_map(const StripFunction& u, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidParameter("rescaling needs 0 <= eps < 1");
  StripFunction out = u;
  for (auto& s : out.stations) s /= (1.0 - eps);
  return out;
}

StripFunction rescale_edge_map_inverse(const StripFunction& u, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidParameter("rescaling needs 0 <= eps < 1");
  StripFunction out = u;
  for (auto& s : out.stations) s *= (1.0 - eps);
  return out;
}

} // namespace graphtube
