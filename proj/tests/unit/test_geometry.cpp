#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <boost/math/special_functions/ellint_2.hpp>

#include "spike/chart.hpp"
#include "spike/errors.hpp"
#include "spike/mesh.hpp"

using namespace spike;

namespace {

double polygon_area(int n) { return 0.5 * n * std::sin(2 * std::numbers::pi / n); }

Eigen::Matrix2d fd_jacobian(const StraighteningChart& c, const Point& z, double h) {
  auto local = [&](const Point& q) {
    Point x = c.forward_unchecked(q) - c.base();
    return Point(c.tangent().dot(x), c.normal().dot(x));
  };
  Eigen::Matrix2d J;
  J.col(0) = (local(z + Point(h, 0)) - local(z - Point(h, 0))) / (2 * h);
  J.col(1) = (local(z + Point(0, h)) - local(z - Point(0, h))) / (2 * h);
  return J;
}

}  // namespace

TEST_CASE("unit disk boundary parameterization") {
  Domain d = Domain::unit_disk();
  CHECK(d.perimeter() == doctest::Approx(2 * std::numbers::pi));
  for (int i = 0; i < 64; ++i) {
    double s = d.perimeter() * i / 64;
    CHECK(d.tangent(s).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.curvature(s) == 1.0);
    CHECK(d.project(d.point(s)) == doctest::Approx(s).epsilon(1e-12));
  }
  CHECK((d.point(0) - Point(0, -1)).norm() < 1e-15);
  CHECK(d.contains(Point(0.3, 0.2)));
  CHECK_FALSE(d.contains(Point(0.9, 0.9)));
}

TEST_CASE("ellipse arclength, curvature and area") {
  Domain e = Domain::ellipse(2.0, 1.0);
  double perim = 4 * 2.0 * boost::math::ellint_2(std::sqrt(1 - 0.25));
  CHECK(e.perimeter() == doctest::Approx(perim).epsilon(1e-10));
  CHECK(e.area() == doctest::Approx(2 * std::numbers::pi).epsilon(1e-12));
  for (int i = 0; i < 32; ++i) CHECK(e.tangent(e.perimeter() * i / 32).norm() == doctest::Approx(1).epsilon(1e-10));
  CHECK(e.curvature(0.0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(e.curvature(e.perimeter() / 4) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(e.min_radius_of_curvature() == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("disk mesh area against the polygon oracle") {
  Mesh coarse = build_disk_mesh(1.0, 0.5);
  CHECK(std::abs(coarse.area() - std::numbers::pi) / std::numbers::pi < 0.02);
  Mesh fine = build_disk_mesh(1.0, 0.1);
  CHECK(fine.area() == doctest::Approx(polygon_area(static_cast<int>(fine.boundary_nodes().size()))).epsilon(1e-12));
  CHECK(std::abs(fine.area() - std::numbers::pi) / std::numbers::pi < 0.002);
  for (int v : fine.boundary_nodes()) CHECK(std::abs(fine.node(v).norm() - 1.0) < 1e-8 * fine.h_max());
}

TEST_CASE("disk mesh node set is mirror symmetric") {
  Mesh m = build_disk_mesh(1.0, 0.2);
  MeshLocator loc(m);
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    Point p = m.node(static_cast<int>(i));
    bool found = false;
    for (const Point& q : m.nodes())
      if ((q - Point(-p.x(), p.y())).norm() < 1e-12) found = true;
    CHECK(found);
  }
}

TEST_CASE("local refinement reaches the requested size") {
  Mesh m = build_disk_mesh(1.0, 0.05, Point(0, -1), 3);
  CHECK(m.local_h(Point(0, -1), 0.02) <= 0.05 / 8 + 1e-12);
  CHECK(m.local_h(Point(0, -1), 0.5) <= 0.05 / 8 + 1e-12);
  for (int v : m.boundary_nodes()) CHECK(std::abs(m.node(v).norm() - 1.0) < 1e-8 * m.h_max());
  CHECK(std::abs(m.area() - std::numbers::pi) < 0.01);
}

TEST_CASE("refined mesh stays conforming") {
  Mesh m = build_graded_disk_mesh(1.0, 0.2, Point(0, -1), 0.02, 0.1);
  // Each interior edge is shared by two triangles, each boundary edge by one.
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : m.triangles())
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      count[{std::min(a, b), std::max(a, b)}]++;
    }
  int boundary_edges = 0;
  for (auto& [e, c] : count) {
    CHECK(c <= 2);
    if (c == 1) {
      ++boundary_edges;
      CHECK(m.is_boundary(e.first));
      CHECK(m.is_boundary(e.second));
    }
  }
  CHECK(boundary_edges == static_cast<int>(m.boundary_nodes().size()));
}

TEST_CASE("invalid disk mesh requests") {
  CHECK_THROWS_AS(build_disk_mesh(1.0, 2.0), Error);
  try {
    build_disk_mesh(1.0, 2.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidResolution);
  }
  CHECK_THROWS_AS(build_disk_mesh(-1.0, 0.1), Error);
  CHECK_THROWS_AS(build_disk_mesh(1.0, 0.1, Point(0, -1), -1), Error);
}

TEST_CASE("ellipse mesh") {
  Domain e = Domain::ellipse(2.0, 1.0);
  Mesh m = build_domain_mesh(e, 0.1);
  CHECK(std::abs(m.area() - 2 * std::numbers::pi) / (2 * std::numbers::pi) < 0.005);
  for (int v : m.boundary_nodes()) CHECK(e.distance_to_boundary(m.node(v)) < 1e-8 * m.h_max());
}

TEST_CASE("locator interpolates linear fields exactly") {
  Mesh m = build_disk_mesh(1.0, 0.1);
  MeshLocator loc(m);
  std::vector<double> f(m.num_nodes());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 2 * m.node(static_cast<int>(i)).x() - m.node(static_cast<int>(i)).y() + 0.5;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int i = 0; i < 200; ++i) {
    Point x(u(rng), u(rng));
    CHECK(loc.interpolate(f, x) == doctest::Approx(2 * x.x() - x.y() + 0.5).epsilon(1e-12));
  }
}

TEST_CASE("disk chart at the south pole") {
  Domain d = Domain::unit_disk();
  StraighteningChart c = boundary_chart(d, Point(0, -1));
  CHECK(c.radius() == doctest::Approx(0.2));
  CHECK(c.phi2_at_0() == 1.0);
  CHECK(c.graph(0).phi == 0.0);
  CHECK(c.graph(0).dphi == 0.0);
  for (double x : {-0.15, -0.05, 0.02, 0.1, 0.19}) {
    CHECK(c.graph(x).phi == doctest::Approx(1 - std::sqrt(1 - x * x)).epsilon(1e-13));
    CHECK(c.graph(x).dphi == doctest::Approx(x / std::sqrt(1 - x * x)).epsilon(1e-12));
  }
  CHECK((c.forward(Point(0, 0)) - Point(0, -1)).norm() < 1e-15);
  Point x = c.forward(Point(0, 0.1));
  CHECK((x - Point(0, -0.9)).norm() < 1e-15);
}

TEST_CASE("chart curvature at every disk point and at the ellipse vertex") {
  Domain d = Domain::unit_disk();
  for (int i = 0; i < 16; ++i) {
    double s = d.perimeter() * i / 16;
    CHECK(boundary_chart(d, d.point(s)).phi2_at_0() == doctest::Approx(1.0).epsilon(1e-12));
  }
  Domain e = Domain::ellipse(2.0, 1.0);
  StraighteningChart c = boundary_chart(e, Point(2, 0));
  CHECK(c.phi2_at_0() == doctest::Approx(2.0).epsilon(1e-6));
  double h = 1e-3;
  double fd = (c.graph(h).phi - 2 * c.graph(0).phi + c.graph(-h).phi) / (h * h);
  CHECK(fd == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("chart round trip") {
  Domain d = Domain::unit_disk();
  StraighteningChart c = boundary_chart(d, Point(0, -1), 0.5);
  Point x = c.forward(Point(0.1, 0.1));
  CHECK(x.norm() <= 1.0);
  CHECK((c.inverse(x) - Point(0.1, 0.1)).norm() < 1e-10);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (const Domain& dom : {Domain::unit_disk(), Domain::ellipse(2.0, 1.0)}) {
    for (double s : {0.0, 1.0, 2.5}) {
      StraighteningChart ch = boundary_chart(dom, dom.point(s));
      double worst = 0;
      for (int i = 0; i < 1000; ++i) {
        double r = ch.radius() * std::sqrt(u(rng)), th = std::numbers::pi * u(rng);
        Point z(r * std::cos(th), r * std::sin(th));
        worst = std::max(worst, (ch.inverse(ch.forward(z)) - z).norm());
      }
      CHECK(worst <= 1e-9);
    }
  }
}

TEST_CASE("chart Jacobian is the identity at the base point") {
  for (const Domain& dom : {Domain::unit_disk(), Domain::ellipse(2.0, 1.0)}) {
    for (int i = 0; i < 16; ++i) {
      StraighteningChart ch = boundary_chart(dom, dom.point(dom.perimeter() * i / 16));
      Eigen::Matrix2d J = fd_jacobian(ch, Point(0, 0), 1e-6 * ch.radius());
      CHECK((J - Eigen::Matrix2d::Identity()).norm() < 1e-8);
    }
  }
}

TEST_CASE("Jacobian expansion residual stays bounded") {
  Domain d = Domain::unit_disk();
  StraighteningChart c = boundary_chart(d, Point(0, -1), 0.5);
  CHECK(jacobian_expansion_residual(c, Point(0, 0)) == 0.0);
  std::vector<double> on_axis;
  for (double s : {0.1, 0.05, 0.025}) on_axis.push_back(jacobian_expansion_residual(c, Point(0, s)));
  for (double r : on_axis) CHECK(r < 1e-3);
  double worst = 0;
  for (double r : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1})
    for (int j = 0; j <= 8; ++j) {
      double th = std::numbers::pi * j / 8;
      worst = std::max(worst, jacobian_expansion_residual(c, Point(r * std::cos(th), r * std::sin(th))));
    }
  CHECK(worst < 2.0);

  StraighteningChart flat = StraighteningChart::flat(Point(0, 0), Point(1, 0), 1.0);
  CHECK(jacobian_expansion_residual(flat, Point(0.3, 0.2)) < 1e-8);
  CHECK(fd_jacobian(flat, Point(0.3, 0.2), 1e-6).determinant() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("chart radius validation") {
  Domain d = Domain::unit_disk();
  CHECK(chart_validity_radius(d, Point(0, -1)) == doctest::Approx(1.0).epsilon(1e-3));
  try {
    boundary_chart(d, Point(0, -1), 1.2);
    FAIL("expected a chart-radius error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ChartRadius);
  }
  CHECK_THROWS_AS(boundary_chart(d, Point(0, -0.9)), Error);
  StraighteningChart c = boundary_chart(d, Point(0, -1));
  CHECK_THROWS_AS(c.forward(Point(0.3, 0.1)), Error);
}

TEST_CASE("cutoff function") {
  double rho = 0.3;
  CHECK(cutoff_xi(rho, rho) == 1.0);
  CHECK(cutoff_xi(rho, 2 * rho) == doctest::Approx(0.0));
  CHECK(cutoff_xi(rho, 1.5 * rho) == doctest::Approx(0.5));
  CHECK(cutoff_xi(rho, 5 * rho) == 0.0);
  double prev = 1.0;
  for (int i = 0; i <= 400; ++i) {
    double t = 3 * rho * i / 400;
    double v = cutoff_xi(rho, t);
    CHECK(v <= prev);
    CHECK(v >= 0.0);
    CHECK(std::abs(v - prev) <= (3 * rho / 400) / rho + 1e-12);
    prev = v;
  }
  CHECK_THROWS_AS(cutoff_xi(0.0, 1.0), Error);
}
