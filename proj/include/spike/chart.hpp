#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "spike/domain.hpp"

namespace spike {

/// Boundary graph over the tangent line, in chart-frame coordinates.
struct GraphSample {
  double phi = 0;
  double dphi = 0;
  double d2phi = 0;
};

/// Local map from the upper half plane onto a neighbourhood of a boundary
/// point P:
///   Phi(z) = P + (z1 - z2 phi'(z1)) T + (z2 + phi(z1)) N
/// with T the unit tangent and N the inner normal at P, so that DPhi(0) = I
/// and the boundary corresponds to z2 = 0.
class StraighteningChart {
 public:
  using GraphFn = std::function<GraphSample(double)>;

  StraighteningChart(Point base, Point tangent, double radius, GraphFn graph);

  /// Chart of a straight boundary (phi = 0).
  static StraighteningChart flat(Point base, Point tangent, double radius);

  const Point& base() const { return base_; }
  const Point& tangent() const { return tangent_; }
  const Point& normal() const { return normal_; }
  double radius() const { return radius_; }
  double phi2_at_0() const { return phi2_at_0_; }

  GraphSample graph(double xi) const { return graph_(xi); }

  /// Phi(z); throws out-of-chart for |z| beyond the chart radius.
  Point forward(const Point& z) const;
  /// Phi(z) with no radius check.
  Point forward_unchecked(const Point& z) const;
  /// Psi(x) = Phi^{-1}(x); throws out-of-chart when the preimage is outside the chart.
  Point inverse(const Point& x) const;
  /// Psi(x) without the radius check, or nothing when Newton fails.
  std::optional<Point> try_inverse(const Point& x) const;

  /// Analytic Jacobian of Phi in frame coordinates.
  Eigen::Matrix2d jacobian(const Point& z) const;

 private:
  Point base_, tangent_, normal_;
  double radius_;
  GraphFn graph_;
  double phi2_at_0_;
};

/// Chart at a boundary point. Without an explicit radius the chart uses
/// 0.2 times the radius of curvature at P (capped by the validity radius).
StraighteningChart boundary_chart(const Domain& domain, const Point& P,
                                  std::optional<double> chart_radius = std::nullopt);

/// Largest radius rho such that the boundary is a graph over [-rho, rho],
/// det DPhi > 0 on the half ball of radius rho, and Phi maps it into the domain.
double chart_validity_radius(const Domain& domain, const Point& P);

/// |det DPhi(z) - (1 - phi''(0) z2)| / |z|^2 with a central-difference Jacobian
/// (step 1e-6 times the chart radius). Returns 0 at z = 0.
double jacobian_expansion_residual(const StraighteningChart& chart, const Point& z);

/// Piecewise-linear cutoff: 1 on [0, rho], 2 - t/rho on (rho, 2 rho], 0 beyond.
double cutoff_xi(double rho, double t);

}  // namespace spike
