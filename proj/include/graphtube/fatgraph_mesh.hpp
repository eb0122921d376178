#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace graphtube {

/// Unscaled vertex neighbourhood X_v: a regular polygon with straight ports.
/// n = 2 gives a square with two opposite ports, n ≥ 3 a regular n-gon whose
/// sides are all ports.
struct VertexTemplate {
  int n = 0;
  double port_length = 1.0;
  std::vector<Eigen::Vector2d> corners; ///< counter-clockwise, centred at 0
  std::vector<int> port_side;           ///< side index of port e (corner e → e+1)
  double area = 0.0;
  double port_total = 0.0;
  double collar_depth = 0.0;

  [[nodiscard]] int sides() const { return static_cast<int>(corners.size()); }
  [[nodiscard]] double c_vol() const { return area / port_total; }
  [[nodiscard]] Eigen::Vector2d outward_normal(int side) const;
  [[nodiscard]] double apothem() const;
};

VertexTemplate build_vertex_region(int n, double port_length = 1.0);

/// Degree-2 vertex region inserted into a strip (δ′ chain).
struct Satellite {
  int edge = 0;
  double position = 0.0; ///< a_ε, distance from the port along the strip
  double length = 0.0;   ///< ε
};

struct FatGraphSpec {
  int n = 3;
  std::vector<double> lengths;       ///< ℓ_e
  double cross_section = 1.0;        ///< vol₁ Y_e = port length
  double eps = 0.1;
  std::vector<Satellite> satellites;

  /// Unit star: n edges of length one.
  static FatGraphSpec unit_star(int n, double eps);
};

enum class RegionKind { Edge, Vertex, Satellite };

struct RegionTag {
  RegionKind kind = RegionKind::Edge;
  int index = 0; ///< edge id for Edge and Satellite, 0 for Vertex
  bool operator==(const RegionTag&) const = default;
};

std::string to_string(const RegionTag& tag);

enum class BoundaryKind { Lateral, End, VertexWall };

struct BoundarySegment {
  int a = 0;
  int b = 0;
  BoundaryKind kind = BoundaryKind::Lateral;
  int edge = -1;
};

/// Structured grid of one edge strip. Station 0 is the port.
struct StripGrid {
  int edge = 0;
  double length = 0.0;                 ///< physical strip length
  double width = 0.0;                  ///< ε · vol₁ Y_e
  std::vector<double> stations;        ///< s coordinates
  std::vector<double> transverse;      ///< y coordinates in [0, width]
  std::vector<std::vector<int>> node;  ///< node[station][j]
  /// Graph coordinate of each station (satellite stretches collapse to a_ε).
  std::vector<double> graph_position;
  std::vector<bool> in_satellite;      ///< per station cell [i, i+1]
};

struct MeshOptions {
  double h = 0.0125;
  /// Step inside vertex and satellite regions; NaN means h.
  double h_region = std::numeric_limits<double>::quiet_NaN();
};

struct FatGraphMesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<RegionTag> region;
  std::vector<BoundarySegment> boundary;
  std::vector<StripGrid> strips;
  std::vector<int> vertex_nodes;       ///< nodes of the scaled vertex region (ports included)
  VertexTemplate vertex;
  FatGraphSpec spec;
  double h = 0.0;

  [[nodiscard]] std::size_t node_count() const { return nodes.size(); }
  [[nodiscard]] double triangle_area(std::size_t t) const;
  [[nodiscard]] double total_area() const;
  [[nodiscard]] double region_area(const RegionTag& tag) const;
  /// Σ ℓ_e ε w + ε² vol X_v (+ satellite lengths).
  [[nodiscard]] double analytic_area() const;
  [[nodiscard]] int edge_count() const;
};

/// Conforming triangulation of X_ε. Strips are glued node to node to the
/// scaled polygon εX_v; satellites are axial sub-rectangles of length ε.
FatGraphMesh build_mesh(const FatGraphSpec& spec, const MeshOptions& options,
                        const VertexTemplate* vertex = nullptr);

/// Mesh of the polygon scale·X_v alone (refinement m per center triangle).
FatGraphMesh build_template_mesh(const VertexTemplate& vertex, int m, double scale = 1.0);

/// Structured mesh of the rectangle (0, lx) × (0, ly), tagged as edge 0.
FatGraphMesh build_rectangle_mesh(double lx, double ly, double h);

bool is_connected(const FatGraphMesh& mesh);
/// V − E + F for the triangulation.
long euler_characteristic(const FatGraphMesh& mesh);

/// Text export: header with counts, node, triangle and boundary tables.
void export_mesh(const FatGraphMesh& mesh, std::ostream& os);

/// Nodal function on a structured strip: values(i, j) at station i, level j.
struct StripFunction {
  std::vector<double> stations;
  std::vector<double> transverse;
  Eigen::MatrixXd values;

  [[nodiscard]] double norm_sq() const;
  /// Dirichlet energy split into longitudinal and transverse parts.
  [[nodiscard]] double energy_s() const;
  [[nodiscard]] double energy_y() const;
  [[nodiscard]] double energy() const { return energy_s() + energy_y(); }
};

/// Pullback under (s, y) ↦ ((1−ε)s, y): the function on the strip of length
/// (1−ε)ℓ becomes a function on the strip of length ℓ.
StripFunction rescale_edge_map(const StripFunction& u, double eps);
/// Inverse of rescale_edge_map.
StripFunction rescale_edge_map_inverse(const StripFunction& u, double eps);

} // namespace graphtube
