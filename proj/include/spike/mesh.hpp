#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "spike/domain.hpp"

namespace spike {

using Triangle = std::array<int, 3>;

/// Conforming triangulation with boundary markers. Validated on construction:
/// positive orientation, no duplicate nodes, indices in range.
class Mesh {
 public:
  Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles, std::vector<char> boundary_flags);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  const std::vector<Point>& nodes() const { return nodes_; }
  const Point& node(int i) const { return nodes_[i]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<char>& boundary_flags() const { return boundary_; }
  bool is_boundary(int i) const { return boundary_[i] != 0; }
  std::vector<int> boundary_nodes() const;

  double h_max() const { return h_max_; }
  double h_min() const { return h_min_; }
  double triangle_area(int t) const;
  double area() const;

  /// Nodes sharing an edge with node i, ascending.
  const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }
  /// Triangles incident to node i, ascending.
  const std::vector<int>& node_triangles(int i) const { return node_tris_[i]; }

  /// Longest edge among triangles touching the ball B(x, radius).
  double local_h(const Point& x, double radius) const;

 private:
  std::vector<Point> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<char> boundary_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::vector<int>> node_tris_;
  double h_max_ = 0;
  double h_min_ = 0;
};

/// Target edge length as a function of position.
using SizeFunction = std::function<double(const Point&)>;
/// Maps a boundary edge midpoint onto the boundary curve.
using SnapFunction = std::function<Point(const Point&)>;

/// Longest-edge bisection until every triangle's longest edge is at most the
/// size function evaluated at its centroid. New boundary nodes are snapped.
Mesh refine_mesh(const Mesh& mesh, const SizeFunction& size, const SnapFunction& snap);

/// Ring triangulation of the disk of given radius centred at the origin.
/// Ring k carries n_k = 6k nodes (12k on the boundary ring) at angles
/// -pi/2 + 2 pi j / n_k. Nodes and triangles are mirror symmetric about the
/// vertical axis, and the node set is invariant under rotation by pi.
/// With refine_levels > 0 the mesh is refined to h_target / 2^levels within
/// distance 10 h_target of refine_point.
Mesh build_disk_mesh(double radius, double h_target, std::optional<Point> refine_point = std::nullopt,
                     int refine_levels = 0);

/// Disk mesh graded toward a point: edge length h_near within r_near of centre,
/// growing with the given slope up to h_far.
Mesh build_graded_disk_mesh(double radius, double h_far, const Point& centre, double h_near,
                            double r_near, double slope = 0.3);

/// Mesh of a star-shaped domain (with respect to its boundary centroid),
/// obtained by mapping the unit ring mesh radially onto the domain.
Mesh build_domain_mesh(const Domain& domain, double h_target);

/// Structured mesh of [x0,x1] x [y0,y1]; every perimeter node is a boundary node.
Mesh build_rectangle_mesh(double x0, double x1, double y0, double y1, double h_target);

/// Rectangle mesh graded toward a point, as build_graded_disk_mesh.
Mesh build_graded_rectangle_mesh(double x0, double x1, double y0, double y1, double h_far, const Point& centre,
                                 double h_near, double r_near, double slope = 0.3);

/// Point location and linear interpolation on a fixed mesh.
class MeshLocator {
 public:
  explicit MeshLocator(const Mesh& mesh);

  /// Triangle containing x (with a small tolerance), if any.
  std::optional<int> find(const Point& x) const;

  /// Barycentric coordinates of x in triangle t.
  std::array<double, 3> barycentric(int t, const Point& x) const;

  /// P1 interpolation. Points outside the mesh use the closest triangle with
  /// barycentric weights clipped to be nonnegative.
  double interpolate(const std::vector<double>& values, const Point& x) const;

 private:
  int nearest_node(const Point& x) const;
  std::pair<int, int> cell_of(const Point& x) const;

  const Mesh* mesh_;
  Point lo_;
  double cell_ = 1;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> cell_tris_;
  std::vector<std::vector<int>> cell_nodes_;
};

}  // namespace spike
