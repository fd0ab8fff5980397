#include "spike/chart.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "spike/errors.hpp"

namespace spike {

namespace {

Point rot90(const Point& v) { return {-v.y(), v.x()}; }

// Graph of the domain boundary near arclength s0, in the frame (T, N) at P.
struct DomainGraph {
  Domain domain;
  Point P, T, N;
  double s0;

  // Arclength of the boundary point whose tangential coordinate is xi.
  double arclength_at(double xi) const {
    double s = s0 + xi;
    for (int it = 0; it < 60; ++it) {
      double g = T.dot(domain.point(s) - P) - xi;
      double gp = T.dot(domain.tangent(s));
      if (gp < 0.05) throw Error(ErrorKind::OutOfChart, "boundary is not a graph over the tangent line");
      double step = g / gp;
      s -= step;
      if (std::abs(step) < 1e-14 * (1.0 + std::abs(s))) return s;
    }
    if (std::abs(T.dot(domain.point(s) - P) - xi) < 1e-12) return s;
    throw Error(ErrorKind::OutOfChart, "boundary graph evaluation did not converge");
  }

  GraphSample operator()(double xi) const {
    if (xi == 0) return {0.0, 0.0, domain.curvature(s0)};
    double s = arclength_at(xi);
    Point t = domain.tangent(s);
    double c = T.dot(t);
    return {N.dot(domain.point(s) - P), N.dot(t) / c, domain.curvature(s) / (c * c * c)};
  }
};

bool graph_ok(const StraighteningChart::GraphFn& g, double rho) {
  try {
    for (int i = -32; i <= 32; ++i) (void)g(rho * i / 32.0);
  } catch (const Error&) {
    return false;
  }
  return true;
}

}  // namespace

StraighteningChart::StraighteningChart(Point base, Point tangent, double radius, GraphFn graph)
    : base_(std::move(base)), tangent_(tangent.normalized()), normal_(rot90(tangent_)), radius_(radius),
      graph_(std::move(graph)) {
  if (!(radius_ > 0)) throw Error(ErrorKind::InvalidParameter, "chart radius must be positive");
  phi2_at_0_ = graph_(0.0).d2phi;
}

StraighteningChart StraighteningChart::flat(Point base, Point tangent, double radius) {
  return StraighteningChart(std::move(base), std::move(tangent), radius,
                            [](double) { return GraphSample{}; });
}

Point StraighteningChart::forward_unchecked(const Point& z) const {
  GraphSample g = graph_(z.x());
  return base_ + (z.x() - z.y() * g.dphi) * tangent_ + (z.y() + g.phi) * normal_;
}

Point StraighteningChart::forward(const Point& z) const {
  if (z.norm() > radius_ * (1 + 1e-12)) throw Error(ErrorKind::OutOfChart, "point lies outside the chart radius");
  return forward_unchecked(z);
}

Eigen::Matrix2d StraighteningChart::jacobian(const Point& z) const {
  GraphSample g = graph_(z.x());
  Eigen::Matrix2d J;
  J << 1 - z.y() * g.d2phi, -g.dphi, g.dphi, 1;
  return J;
}

std::optional<Point> StraighteningChart::try_inverse(const Point& x) const {
  Point X(tangent_.dot(x - base_), normal_.dot(x - base_));
  try {
    Point z(X.x(), X.y() - graph_(X.x()).phi);
    for (int it = 0; it < 60; ++it) {
      GraphSample g = graph_(z.x());
      Point F(z.x() - z.y() * g.dphi - X.x(), z.y() + g.phi - X.y());
      Eigen::Matrix2d J;
      J << 1 - z.y() * g.d2phi, -g.dphi, g.dphi, 1;
      if (!(J.determinant() > 0)) return std::nullopt;
      Point dz = J.partialPivLu().solve(F);
      z -= dz;
      if (!std::isfinite(z.x()) || !std::isfinite(z.y())) return std::nullopt;
      if (dz.norm() <= 1e-15 * (1.0 + z.norm())) return z;
    }
    // Newton stalls at roundoff level; accept when the residual is tiny.
    GraphSample g = graph_(z.x());
    Point F(z.x() - z.y() * g.dphi - X.x(), z.y() + g.phi - X.y());
    if (F.norm() <= 1e-13 * (1.0 + X.norm())) return z;
  } catch (const Error&) {
  }
  return std::nullopt;
}

Point StraighteningChart::inverse(const Point& x) const {
  auto z = try_inverse(x);
  if (!z || z->norm() > radius_ * (1 + 1e-9))
    throw Error(ErrorKind::OutOfChart, "point lies outside the chart image");
  return *z;
}

double chart_validity_radius(const Domain& domain, const Point& P) {
  double s0 = domain.project(P);
  Point T = domain.tangent(s0);
  DomainGraph dg{domain, domain.point(s0), T, rot90(T), s0};
  StraighteningChart::GraphFn g = dg;
  StraighteningChart probe(dg.P, T, 1.0, g);

  auto ok = [&](double rho) {
    if (!graph_ok(g, rho)) return false;
    try {
      for (int i = 1; i <= 16; ++i)
        for (int j = 0; j <= 16; ++j) {
          double r = rho * i / 16.0, th = std::numbers::pi * j / 16.0;
          Point z(r * std::cos(th), r * std::sin(th));
          if (!(probe.jacobian(z).determinant() > 0)) return false;
          if (j > 0 && j < 16 && !domain.contains(probe.forward_unchecked(z))) return false;
        }
    } catch (const Error&) {
      return false;
    }
    return true;
  };

  double hi = domain.perimeter() / 4;
  if (ok(hi)) return hi;
  double lo = 0;
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    if (ok(mid)) lo = mid; else hi = mid;
  }
  return lo;
}

StraighteningChart boundary_chart(const Domain& domain, const Point& P, std::optional<double> chart_radius) {
  double s0 = domain.project(P);
  Point Pb = domain.point(s0);
  if ((Pb - P).norm() > 1e-8) throw Error(ErrorKind::Precondition, "chart base point is not on the boundary");
  Point T = domain.tangent(s0);
  DomainGraph dg{domain, Pb, T, rot90(T), s0};
  double valid = chart_validity_radius(domain, Pb);
  double radius;
  if (chart_radius) {
    radius = *chart_radius;
    if (!(radius > 0)) throw Error(ErrorKind::InvalidParameter, "chart radius must be positive");
    if (radius > valid)
      throw Error(ErrorKind::ChartRadius, "chart radius " + std::to_string(radius) +
                                              " exceeds the graph-validity radius " + std::to_string(valid));
  } else {
    double kappa = std::abs(domain.curvature(s0));
    radius = std::min(valid, kappa > 0 ? 0.2 / kappa : 0.2 * valid);
  }
  return StraighteningChart(Pb, T, radius, dg);
}

double jacobian_expansion_residual(const StraighteningChart& chart, const Point& z) {
  double nz = z.norm();
  if (nz == 0) return 0.0;
  if (nz > chart.radius() * (1 + 1e-12)) throw Error(ErrorKind::OutOfChart, "point lies outside the chart radius");
  double h = 1e-6 * chart.radius();
  auto local = [&](const Point& q) {
    Point x = chart.forward_unchecked(q) - chart.base();
    return Point(chart.tangent().dot(x), chart.normal().dot(x));
  };
  Point d1 = (local(z + Point(h, 0)) - local(z - Point(h, 0))) / (2 * h);
  Point d2 = (local(z + Point(0, h)) - local(z - Point(0, h))) / (2 * h);
  double det = d1.x() * d2.y() - d1.y() * d2.x();
  return std::abs(det - (1 - chart.phi2_at_0() * z.y())) / (nz * nz);
}

double cutoff_xi(double rho, double t) {
  if (!(rho > 0)) throw Error(ErrorKind::InvalidParameter, "cutoff radius must be positive");
  if (!(t >= 0)) throw Error(ErrorKind::InvalidParameter, "cutoff argument must be nonnegative");
  if (t <= rho) return 1.0;
  if (t <= 2 * rho) return 2.0 - t / rho;
  return 0.0;
}

}  // namespace spike
