#include "spike/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spike/errors.hpp"
#include "spike/domain.hpp"
#include "spike/mesh.hpp"

namespace spike {

namespace {

// Barycentric interpolation corrected by recovered nodal gradients:
// sum l_i u_i + 1/2 sum l_i g_i.(y - x_i), exact for quadratics when the
// gradients are.
Field interpolate_at(const Field& u, const std::function<Point(const Point&)>& map) {
  const Mesh& mesh = *u.mesh;
  MeshLocator loc(mesh);
  std::vector<Point> g = recovered_gradient(u);
  std::vector<double> vals(u.values.data(), u.values.data() + u.values.size());
  Eigen::VectorXd out(mesh.num_nodes());
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    Point y = map(mesh.node(static_cast<int>(i)));
    std::optional<int> t = loc.find(y);
    if (!t) {
      out[i] = loc.interpolate(vals, y);
      continue;
    }
    const Triangle& tri = mesh.triangles()[*t];
    std::array<double, 3> l = loc.barycentric(*t, y);
    double v = 0;
    for (int k = 0; k < 3; ++k)
      v += l[k] * (u.values[tri[k]] + 0.5 * g[tri[k]].dot(y - mesh.node(tri[k])));
    out[i] = v;
  }
  return Field(u.mesh, std::move(out));
}

}  // namespace

AlignedField align_axis(const Field& u, const Point& peak) {
  if (!(u.max() - u.min() > 1e-6 * std::abs(u.max())))
    throw Error(ErrorKind::DegenerateAxis, "field is constant; the axis is undefined");
  if (peak.norm() < 1e-12) throw Error(ErrorKind::DegenerateAxis, "peak at the origin; the axis is undefined");
  const double theta = std::atan2(peak.y(), peak.x());
  const double rot = std::numbers::pi / 2 - theta;
  if (std::abs(rot) < 1e-15) return {u, theta};
  // aligned(x) = u(R^{-1} x) with R the rotation by rot.
  const double c = std::cos(rot), s = std::sin(rot);
  Field out = interpolate_at(u, [c, s](const Point& x) { return Point(c * x.x() + s * x.y(), -s * x.x() + c * x.y()); });
  return {out, theta};
}

double reflection_residual(const Field& u) {
  Field r = interpolate_at(u, [](const Point& x) { return Point(-x.x(), x.y()); });
  return (u.values - r.values).cwiseAbs().maxCoeff() / u.max();
}

std::vector<Point> recovered_gradient(const Field& u) {
  const Mesh& mesh = *u.mesh;
  std::vector<Point> g(mesh.num_nodes(), Point::Zero());
  std::vector<double> w(mesh.num_nodes(), 0.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles()[t];
    const Point &a = mesh.node(tri[0]), &b = mesh.node(tri[1]), &c = mesh.node(tri[2]);
    const double area = mesh.triangle_area(static_cast<int>(t));
    Point grad = (u.values[tri[0]] * Point(b.y() - c.y(), c.x() - b.x()) +
                  u.values[tri[1]] * Point(c.y() - a.y(), a.x() - c.x()) +
                  u.values[tri[2]] * Point(a.y() - b.y(), b.x() - a.x())) /
                 (2 * area);
    for (int k = 0; k < 3; ++k) {
      g[tri[k]] += area * grad;
      w[tri[k]] += area;
    }
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    if (w[i] > 0) g[i] /= w[i];
  return g;
}

namespace {

template <class Select, class Quantity>
MonotonicityResult scan(const Field& u, Select select, Quantity q) {
  const Mesh& mesh = *u.mesh;
  std::vector<Point> g = recovered_gradient(u);
  MonotonicityResult r;
  r.min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    r.max_grad = std::max(r.max_grad, g[i].norm());
    const Point& x = mesh.node(static_cast<int>(i));
    if (!select(x)) continue;
    ++r.nodes;
    double v = q(x, g[i]);
    if (v < r.min) {
      r.min = v;
      r.where = x;
    }
  }
  if (r.nodes == 0) throw Error(ErrorKind::Precondition, "monotonicity test set is empty");
  return r;
}

}  // namespace

MonotonicityResult angular_monotonicity(const Field& u, double margin) {
  if (margin < 0) margin = 3 * u.mesh->h_max();
  return scan(
      u, [margin](const Point& x) { return x.x() > margin; },
      [](const Point& x, const Point& g) { return x.x() * g.y() - x.y() * g.x(); });
}

MonotonicityResult vertical_monotonicity(const Field& u) {
  const double band = 2 * u.mesh->h_max();
  return scan(
      u, [band](const Point& x) { return x.y() < 0 && (x - Point(0, -1)).norm() > band; },
      [](const Point&, const Point& g) { return g.y(); });
}

double symmetry_axis(const Field& u, int peak_index) {
  const Mesh& mesh = *u.mesh;
  const Point& x0 = mesh.node(peak_index);
  if (x0.norm() < 1e-12) throw Error(ErrorKind::DegenerateAxis, "peak at the origin; the axis is undefined");
  const double t0 = std::atan2(x0.y(), x0.x());
  double spacing = 0;
  for (int j : mesh.neighbors(peak_index)) spacing = std::max(spacing, (mesh.node(j) - x0).norm());
  const double half_width = 2 * spacing / x0.norm();
  Eigen::VectorXd m = assemble(mesh).lumped_mass;
  auto asymmetry = [&](double alpha) {
    Point e(std::cos(alpha), std::sin(alpha));
    Field r = interpolate_at(u, [e](const Point& x) { return Point(2 * x.dot(e) * e - x); });
    return (u.values - r.values).cwiseAbs2().dot(m);
  };
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = t0 - half_width, b = t0 + half_width;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = asymmetry(x1), f2 = asymmetry(x2);
  while (b - a > 1e-9) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = asymmetry(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = asymmetry(x2);
    }
  }
  return 0.5 * (a + b);
}

SymmetryReport symmetry_report(double d, const Field& u, int peak_index) {
  SymmetryReport r;
  r.d = d;
  const double axis = symmetry_axis(u, peak_index);
  AlignedField a = align_axis(u, Point(std::cos(axis), std::sin(axis)));
  r.axis_angle = a.axis_angle;
  const Point& p = u.mesh->node(peak_index);
  r.peak_angle = std::atan2(p.y(), p.x());
  r.reflection_residual = reflection_residual(a.u);
  MonotonicityResult ang = angular_monotonicity(a.u);
  MonotonicityResult ver = vertical_monotonicity(a.u);
  r.angular_min = ang.min / ang.max_grad;
  r.vertical_min = ver.min / ver.max_grad;
  r.maxima_count = count_local_maxima(u).count;
  return r;
}

DiskSymmetryRun disk_symmetry_run(double d, double per_sqrt_d, double tilt) {
  if (!(d > 0) || !(per_sqrt_d > 0)) throw Error(ErrorKind::InvalidParameter, "d and per_sqrt_d must be positive");
  Domain disk = Domain::unit_disk();
  auto mesh = std::make_shared<const Mesh>(build_disk_mesh(1.0, std::min(0.05, std::sqrt(d) / per_sqrt_d)));
  Field f = initial_field(InitPreset::CurvatureBump, d, mesh, disk);
  for (std::size_t i = 0; i < mesh->num_nodes(); ++i) f.values[i] *= 1 + tilt * mesh->node(static_cast<int>(i)).x();
  SolveOptions o;
  o.init = InitPreset::Custom;
  o.custom_init = f;
  DiskSymmetryRun run{solve_ground_state(d, mesh, disk, o), {}};
  if (!run.solve.u) throw Error(ErrorKind::Precondition, "solver returned no field");
  run.symmetry = symmetry_report(d, *run.solve.u, run.solve.peak_index);
  return run;
}

}  // namespace spike
