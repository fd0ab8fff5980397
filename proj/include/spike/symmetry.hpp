#pragma once

#include <vector>

#include "spike/fem.hpp"
#include "spike/ground_state.hpp"

namespace spike {

/// Rotation about the origin taking the peak to the positive second axis,
/// with values re-interpolated onto the original mesh.
struct AlignedField {
  Field u;
  double axis_angle;  // polar angle of the peak before rotation
};
AlignedField align_axis(const Field& u, const Point& peak);

/// sup_x |u(x1, x2) - u(-x1, x2)| / max u over the nodes.
double reflection_residual(const Field& u);

/// Area-weighted average of the per-triangle P1 gradients at each node.
std::vector<Point> recovered_gradient(const Field& u);

struct MonotonicityResult {
  double min = 0;
  Point where = Point::Zero();
  double max_grad = 0;  // max |grad u| over all nodes
  int nodes = 0;        // nodes in the test set
};

/// min of x1 d2u - x2 d1u over nodes with x1 > margin. A negative margin
/// selects 3 h_max.
MonotonicityResult angular_monotonicity(const Field& u, double margin = -1);
/// min of d2u over nodes with x2 < 0, excluding nodes within 2 h_max of (0,-1).
MonotonicityResult vertical_monotonicity(const Field& u);

struct SymmetryReport {
  double d = 0;
  double axis_angle = 0;
  double peak_angle = 0;  // polar angle of the peak node
  double reflection_residual = 0;
  double angular_min = 0;   // relative to max |grad u|
  double vertical_min = 0;  // relative to max |grad u|
  int maxima_count = 0;
};

/// Polar angle of the line through the origin about which u is closest to
/// mirror symmetric (lumped L2 norm), searched within two mesh spacings of
/// the peak node's angle.
double symmetry_axis(const Field& u, int peak_index);

/// All diagnostics for a solved field on the unit disk, aligned on the
/// symmetry axis near the peak.
SymmetryReport symmetry_report(double d, const Field& u, int peak_index);

/// Solve on a uniform unit-disk mesh with h = min(0.05, sqrt(d) / per_sqrt_d)
/// from the curvature bump scaled by (1 + tilt x1), then run the diagnostics.
struct DiskSymmetryRun {
  SolveReport solve;
  SymmetryReport symmetry;
};
DiskSymmetryRun disk_symmetry_run(double d, double per_sqrt_d = 10, double tilt = 0.1);

}  // namespace spike
