#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spike/errors.hpp"
#include "spike/mesh.hpp"
#include "spike/symmetry.hpp"

using namespace spike;

namespace {

std::shared_ptr<const Mesh> disk(double h = 0.05) { return std::make_shared<const Mesh>(build_disk_mesh(1.0, h)); }

template <class F>
Field sample(const std::shared_ptr<const Mesh>& mesh, F f) {
  Eigen::VectorXd v(mesh->num_nodes());
  for (std::size_t i = 0; i < mesh->num_nodes(); ++i) v[i] = f(mesh->node(static_cast<int>(i)));
  return Field(mesh, v);
}

double bump(const Point& x, const Point& c) { return std::exp(-4 * (x - c).squaredNorm()); }

}  // namespace

TEST_CASE("align_axis rotations") {
  auto mesh = disk();
  SUBCASE("peak on the positive second axis is left in place") {
    Field u = sample(mesh, [](const Point& x) { return bump(x, Point(0, 1)); });
    AlignedField a = align_axis(u, Point(0, 0.7));
    CHECK(a.axis_angle == doctest::Approx(std::numbers::pi / 2));
    CHECK((a.u.values - u.values).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("peak at (r, 0) rotates by a quarter turn") {
    Field u = sample(mesh, [](const Point& x) { return bump(x, Point(1, 0)); });
    AlignedField a = align_axis(u, Point(1, 0));
    CHECK(a.axis_angle == doctest::Approx(0.0));
    Field expected = sample(mesh, [](const Point& x) { return bump(x, Point(0, 1)); });
    CHECK((a.u.values - expected.values).cwiseAbs().maxCoeff() <= 1e-3 * u.max());
    CHECK(reflection_residual(a.u) <= 1e-3);
  }
  SUBCASE("degenerate inputs") {
    Field c(mesh, Eigen::VectorXd::Constant(mesh->num_nodes(), 2.0));
    try {
      align_axis(c, Point(0, 1));
      FAIL("expected a degenerate-axis error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateAxis);
    }
    Field u = sample(mesh, [](const Point& x) { return bump(x, Point(0, 1)); });
    try {
      align_axis(u, Point(0, 0));
      FAIL("expected a degenerate-axis error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateAxis);
    }
  }
}

TEST_CASE("reflection residual on synthetic fields") {
  auto mesh = disk();
  Field sym = sample(mesh, [](const Point& x) { return 1 + x.y() + x.x() * x.x(); });
  CHECK(reflection_residual(sym) <= 1e-12);

  // u = x1 + 2 keeps max u away from zero; u(x) - u(Sx) = 2 x1.
  Field odd = sample(mesh, [](const Point& x) { return x.x() + 2; });
  double max_x1 = 0;
  for (std::size_t i = 0; i < mesh->num_nodes(); ++i) max_x1 = std::max(max_x1, std::abs(mesh->node(static_cast<int>(i)).x()));
  CHECK(reflection_residual(odd) == doctest::Approx(2 * max_x1 / odd.max()).epsilon(1e-9));
}

TEST_CASE("monotonicity scans on synthetic fields") {
  auto mesh = disk();
  const double h = mesh->h_max();

  Field radial = sample(mesh, [](const Point& x) { return std::exp(-x.squaredNorm()); });
  MonotonicityResult r = angular_monotonicity(radial);
  CHECK(std::abs(r.min) <= 1e-2 * r.max_grad);
  CHECK(r.nodes > 0);

  Field x2 = sample(mesh, [](const Point& x) { return x.y(); });
  MonotonicityResult ang = angular_monotonicity(x2);
  CHECK(ang.min > 0);
  CHECK(ang.min == doctest::Approx(ang.where.x()).epsilon(1e-9));
  CHECK(ang.where.x() > 3 * h);
  MonotonicityResult ver = vertical_monotonicity(x2);
  CHECK(ver.min == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ver.where.y() < 0);

  std::vector<Point> g = recovered_gradient(sample(mesh, [](const Point& x) { return 3 * x.x() - x.y(); }));
  for (const Point& p : g) {
    CHECK(p.x() == doctest::Approx(3.0));
    CHECK(p.y() == doctest::Approx(-1.0));
  }
}

TEST_CASE("symmetry axis recovers a rotated bump") {
  auto mesh = disk(0.04);
  const double angle = -1.1;
  Point c(std::cos(angle), std::sin(angle));
  Field u = sample(mesh, [&](const Point& x) { return bump(x, c); });
  int peak = 0;
  u.values.maxCoeff(&peak);
  CHECK(symmetry_axis(u, peak) == doctest::Approx(angle).epsilon(2e-3));
  SymmetryReport s = symmetry_report(0.1, u, peak);
  CHECK(s.reflection_residual <= 1e-2);
  CHECK(s.maxima_count == 1);
}

TEST_CASE("solved ground state at d = 0.05 is symmetric and monotone") {
  DiskSymmetryRun run = disk_symmetry_run(0.05);
  REQUIRE(run.solve.converged);
  CHECK(run.solve.peak_on_boundary);
  const SymmetryReport& s = run.symmetry;
  CHECK(s.maxima_count == 1);
  CHECK(s.reflection_residual < 1e-2);
  CHECK(s.angular_min >= -1e-3);
  CHECK(s.vertical_min >= -1e-3);
  // The axis sits within two boundary spacings of the peak node.
  CHECK(std::abs(s.axis_angle - s.peak_angle) <= 2 * std::sqrt(0.05) / 10);
}
