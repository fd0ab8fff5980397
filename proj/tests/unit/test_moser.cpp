#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "spike/errors.hpp"
#include "spike/moser.hpp"

using namespace spike;

namespace {

constexpr double kPi = std::numbers::pi;

// Oracle: pi int_a^b g(r) r dr on the half disk, tanh-sinh in r.
template <class G>
double half_disk_radial(G g, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return kPi * ts.integrate([&](double r) { return g(r) * r; }, a, b, 1e-13);
}

}  // namespace

TEST_CASE("Moser function values at the case boundaries") {
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const double delta = 0.5;
    MoserFunction u(eps, delta);
    const double L = std::log(1 / eps);
    CHECK(moser_eval(eps, delta, Point(0, 0)) == doctest::Approx(std::sqrt(L / (2 * kPi))).epsilon(1e-15));
    CHECK(moser_eval(eps, delta, Point(delta, 0)) == 0.0);
    double rj = delta * std::sqrt(eps);
    double ramp = std::sqrt(2 / (-kPi * std::log(eps))) * std::log(1 / std::sqrt(eps));
    CHECK(ramp == doctest::Approx(u.plateau()).epsilon(1e-14));
    CHECK(u.value(rj * (1 + 1e-12)) == doctest::Approx(u.plateau()).epsilon(1e-10));
    CHECK(u.value(delta * (1 - 1e-12)) < 1e-10);
    CHECK(moser_eval(eps, delta, Point(1.3, 0.2), Point(1.0, 0.0)) == doctest::Approx(u.value(std::hypot(0.3, 0.2))));
  }
  CHECK_THROWS_AS(MoserFunction(0.0), Error);
  CHECK_THROWS_AS(MoserFunction(1.0), Error);
  CHECK_THROWS_AS(moser_eval(0.1, 0.5, Point(0.6, 0)), Error);
}

TEST_CASE("Moser normalization against radial quadrature") {
  std::vector<double> products;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    MoserFunction u(eps, 0.5);
    const double c2 = 2 / (kPi * u.log_inv_eps());
    double dir = half_disk_radial([&](double r) { return c2 / (r * r); }, 0.5 * std::sqrt(eps), 0.5);
    CHECK(std::abs(dir - 1) <= 1e-8);
    CHECK(std::abs(u.dirichlet() - 1) <= 1e-14);
    double l2 = half_disk_radial([&](double r) { return u.value(r) * u.value(r); }, 0, 0.5 * std::sqrt(eps)) +
                half_disk_radial([&](double r) { return u.value(r) * u.value(r); }, 0.5 * std::sqrt(eps), 0.5);
    CHECK(u.l2_squared() == doctest::Approx(l2).epsilon(1e-10));
    products.push_back(u.l2_squared() * u.log_inv_eps());
  }
  for (double p : products) CHECK(p < 0.2);
}

TEST_CASE("Trudinger-Moser functional against radial quadrature") {
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    MoserFunction u(eps, 0.5);
    const double N2 = u.h1_norm() * u.h1_norm();
    for (double alpha : {0.5 * kPi, 2 * kPi}) {
      auto g = [&](double r) {
        double v2 = u.value(r) * u.value(r) / N2;
        return v2 * std::expm1(alpha * v2);
      };
      double rj = 0.5 * std::sqrt(eps);
      double oracle = half_disk_radial(g, 0, rj) + half_disk_radial(g, rj, 0.5);
      CHECK(tm_functional(u, alpha) == doctest::Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("Trudinger-Moser functional properties") {
  MoserFunction u(1e-4);
  CHECK(tm_functional(u, 0.0) == 0.0);
  double prev = 0;
  for (double a = 0.5; a <= 2 * kPi + 1e-12; a += 0.5) {
    double v = tm_functional(u, a);
    CHECK(v > prev);
    prev = v;
  }
  // Lower bound c log(1/eps) at the critical exponent.
  CHECK(tm_functional(u, 2 * kPi) >= 0.05 * u.log_inv_eps());
  CHECK_THROWS_AS(tm_functional(u, -1.0), Error);
  try {
    tm_functional(MoserFunction(1e-300), 1000.0);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Overflow);
    CHECK(std::string(e.what()).find("plateau") != std::string::npos);
  }

  auto mesh = std::make_shared<const Mesh>(build_disk_mesh(1.0, 0.2));
  CHECK(tm_functional(Field(mesh, Eigen::VectorXd::Zero(mesh->num_nodes())), 2 * kPi) == 0.0);
  Field c(mesh, Eigen::VectorXd::Constant(mesh->num_nodes(), 3.0));
  // Constant c: v^2 = 1 / area after normalization.
  double area = mesh->area();
  CHECK(tm_functional(c, 1.0) == doctest::Approx(area * (1 / area) * std::expm1(1 / area)).epsilon(1e-12));
}

TEST_CASE("sharpness sweep classification") {
  std::vector<double> eps{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  SharpnessTable t = sharpness_sweep({2 * kPi, 0.9 * 2 * kPi, 0.0}, eps);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].growth == Growth::Diverging);
  CHECK(t.rows[0].slope > 0);
  CHECK(t.rows[0].r_squared > 0.9);
  CHECK(t.rows[1].growth == Growth::Bounded);
  CHECK(t.rows[1].ratio <= 2);
  CHECK(t.rows[2].growth == Growth::Bounded);
  for (double v : t.rows[2].values) CHECK(v == 0.0);
  CHECK_THROWS_AS(sharpness_sweep({2 * kPi}, {1e-2, 1e-3, 1e-4}), Error);
  CHECK_THROWS_AS(sharpness_sweep({2 * kPi}, {1e-6, 1e-2}), Error);
}
