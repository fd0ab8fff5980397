#pragma once

#include <functional>
#include <memory>

#include <Eigen/Dense>

namespace spike {

using Point = Eigen::Vector2d;

/// A smooth bounded planar region described by its boundary curve.
///
/// The boundary is exposed through an arclength parameter s in [0, L),
/// oriented counter-clockwise so that the inner normal is the tangent rotated
/// by +90 degrees. Curvature is signed: positive where the boundary bends
/// toward the interior (every point of a convex domain).
///
/// Instances are immutable and cheap to copy.
class Domain {
 public:
  enum class Kind { UnitDisk, GenericCurve };

  /// Unit disk. The arclength origin is the point (0, -1).
  static Domain unit_disk();

  /// Ellipse with semi-axes a (along x) and b (along y); arclength origin at (a, 0).
  static Domain ellipse(double a, double b);

  /// Generic closed curve from a parameterization t in [0, period) with its
  /// derivative. The curve must be simple, counter-clockwise and C^2.
  static Domain from_parametric(std::function<Point(double)> curve,
                                std::function<Point(double)> derivative, double period);

  Kind kind() const;
  double perimeter() const;

  Point point(double s) const;
  /// Unit tangent at arclength s.
  Point tangent(double s) const;
  /// Inner unit normal at arclength s.
  Point inner_normal(double s) const;
  double curvature(double s) const;

  /// Arclength of the boundary point closest to x.
  double project(const Point& x) const;
  double distance_to_boundary(const Point& x) const;
  bool contains(const Point& x) const;

  /// Smallest radius of curvature over the boundary (infinite for a flat boundary).
  double min_radius_of_curvature() const;

  /// Area enclosed by the boundary.
  double area() const;

 private:
  struct Impl;
  explicit Domain(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace spike
