#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spike/errors.hpp"
#include "spike/radial_profile.hpp"

using namespace spike;

namespace {

// Frozen outputs of an independent shooting oracle (scipy DOP853, rtol 1e-12,
// bisection over 60 steps, adaptive quadrature with a K0 tail beyond r = 12).
constexpr double kOracleAmplitude = 1.7735719048210365;
constexpr double kOracleI = 2.939573652802086;
constexpr double kOracleGamma = 0.4390875313599518;

const ShootingResult& ground() {
  static const ShootingResult s = shoot(1e-10, 25);
  return s;
}

}  // namespace

TEST_CASE("nonlinearity primitive and small-amplitude behaviour") {
  CHECK(Nonlinearity::f(0) == 0.0);
  CHECK(Nonlinearity::F(0) == 0.0);
  CHECK(std::abs(Nonlinearity::f(1e-6) / 1e-6) <= 1e-11);
  for (int i = 0; i < 100; ++i) {
    double w = -2.5 + 5.0 * (i + 0.5) / 100;
    double h = 1e-5 * std::max(1.0, std::abs(w));
    double fd = (Nonlinearity::F(w + h) - Nonlinearity::F(w - h)) / (2 * h);
    CHECK(fd == doctest::Approx(Nonlinearity::f(w)).epsilon(1e-6));
    double dfd = (Nonlinearity::f(w + h) - Nonlinearity::f(w - h)) / (2 * h);
    CHECK(dfd == doctest::Approx(Nonlinearity::df(w)).epsilon(1e-6));
  }
  // Series branch against the closed form where both are accurate.
  CHECK(Nonlinearity::F(0.7) == doctest::Approx(0.5 * (std::exp(0.49) - 0.49 - 1)).epsilon(1e-14));
}

TEST_CASE("constant equilibrium stays constant") {
  double c = std::sqrt(std::numbers::ln2);
  Trajectory t = integrate_radial(c, 25, 1e-12);
  CHECK(t.reason == StopReason::ReachedRmax);
  CHECK(t.r.back() == doctest::Approx(25.0));
  double dev = 0;
  for (double w : t.w) dev = std::max(dev, std::abs(w - c));
  CHECK(dev <= 1e-10);
}

TEST_CASE("trajectory classification") {
  CHECK(integrate_radial(1e-3, 25, 1e-12).reason != StopReason::Decayed);
  CHECK(integrate_radial(5.0, 25, 1e-12).reason == StopReason::CrossedZero);
  CHECK_THROWS_AS(integrate_radial(1.0, 25, 1e-3), Error);
  CHECK_THROWS_AS(integrate_radial(-1.0, 25, 1e-12), Error);
}

TEST_CASE("shooting finds the monotone ground state") {
  const ShootingResult& s = ground();
  const RadialProfile& p = s.profile;
  CHECK(p.amplitude() > std::sqrt(std::numbers::ln2));
  CHECK(p.amplitude() == doctest::Approx(kOracleAmplitude).epsilon(1e-9));
  CHECK(s.lower_reason != StopReason::CrossedZero);
  CHECK(s.upper_reason == StopReason::CrossedZero);
  CHECK(s.upper - s.lower <= 1e-10);
  for (std::size_t i = 1; i < p.r().size(); ++i) {
    CHECK(p.w()[i] > 0);
    CHECK(p.w()[i] < p.w()[i - 1]);
    CHECK(p.dw()[i] < 0);
  }
  CHECK(p.w().back() <= 1e-8);
}

TEST_CASE("amplitude is insensitive to r_max") {
  double a50 = shoot_ground_state(1e-10, 50).amplitude();
  CHECK(std::abs(a50 - ground().profile.amplitude()) <= 1e-8);
}

TEST_CASE("short r_max cannot bracket") {
  try {
    shoot_ground_state(1e-10, 3);
    FAIL("expected a bracketing error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Bracket);
    CHECK(is_usage_error(e.kind()));
  }
}

TEST_CASE("exponential decay rate") {
  const RadialProfile& p = ground().profile;
  double theta = decay_rate(p, 10, 15);
  CHECK(theta > 0.5);
  CHECK(theta <= 1.2);
  CHECK(std::abs(decay_rate_bessel(p, 10, 15) - 1.0) <= 0.05);
  CHECK(p.theta == theta);

  std::vector<double> r, w, dw;
  for (int i = 0; i <= 1500; ++i) {
    double x = 0.01 * i;
    r.push_back(x);
    w.push_back(std::exp(-2 * x));
    dw.push_back(-2 * std::exp(-2 * x));
  }
  RadialProfile synth(r, w, dw);
  CHECK(decay_rate(synth, 5, 10) == doctest::Approx(2.0).epsilon(1e-6));

  w[800] = -1e-3;
  RadialProfile bad(r, w, dw);
  try {
    decay_rate(bad, 5, 10);
    FAIL("expected a fit error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Fit);
  }
}

TEST_CASE("energy, gamma and the integral identities") {
  const RadialProfile& p = ground().profile;
  double I = energy_I(p), g = gamma_constant(p);
  CHECK(I > 0);
  CHECK(I == doctest::Approx(kOracleI).epsilon(1e-6));
  CHECK(g == doctest::Approx(kOracleGamma).epsilon(1e-6));

  NehariIdentity n = nehari_identity(p);
  CHECK(n.relative_residual <= 1e-4);

  PohozaevResiduals q = pohozaev_checks(p);
  CHECK(q.residual_z1 <= 1e-3);
  CHECK(q.residual_z2 <= 1e-3);
  CHECK(q.residual_energy <= 1e-3);
  CHECK(q.moment_z1 / g == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(q.moment_z2 / g == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("zero profile conventions") {
  RadialProfile zero({0.0, 1.0, 2.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
  CHECK(energy_I(zero) == 0.0);
  CHECK(gamma_constant(zero) == 0.0);
  PohozaevResiduals q = pohozaev_checks(zero);
  CHECK(q.residual_z1 == 0.0);
  CHECK(q.residual_z2 == 0.0);
  CHECK(q.residual_energy == 0.0);
}

TEST_CASE("integrator tolerance convergence") {
  const RadialProfile& p = ground().profile;
  RadialProfile q = shoot_ground_state(1e-10, 25, 5e-13);
  CHECK(std::abs(energy_I(q) / energy_I(p) - 1) <= 1e-7);
  CHECK(std::abs(gamma_constant(q) / gamma_constant(p) - 1) <= 1e-7);
}
