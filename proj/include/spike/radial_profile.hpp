#pragma once

#include <string>
#include <vector>

namespace spike {

/// f(w) = w (e^{w^2} - 1) and its primitive F(w) = (e^{w^2} - w^2 - 1) / 2.
struct Nonlinearity {
  static double f(double w);
  static double F(double w);
  /// f'(w) = e^{w^2}(1 + 2 w^2) - 1.
  static double df(double w);
};

enum class StopReason { Decayed, CrossedZero, TurnedUp, ReachedRmax };

const char* to_string(StopReason reason);

/// Samples of a solution of w'' + w'/r = w (2 - e^{w^2}), w(0) = a, w'(0) = 0.
struct Trajectory {
  std::vector<double> r, w, dw;
  StopReason reason = StopReason::ReachedRmax;
};

/// Radial integration on a uniform output grid (step dr) with an adaptive
/// Runge-Kutta-Fehlberg 7(8) stepper at relative tolerance tol. Starts from
/// the two-term series at a small radius. Stops at the first grid point where
/// w < 0 (crossed-zero), w' > 0 with w > 0 or w > 2a (turned-up), or
/// w < 1e-8 with |w'| < 1e-8 (decayed).
Trajectory integrate_radial(double amplitude, double r_max, double tol, double dr = 0.0025);

/// Radial profile on a grid 0 = r_0 < ... < r_n = r_max, evaluated between
/// grid points by cubic Hermite interpolation and beyond r_max by the tail
/// c K0(r), with c fitted on [r_max - 5, r_max].
class RadialProfile {
 public:
  RadialProfile() = default;
  RadialProfile(std::vector<double> r, std::vector<double> w, std::vector<double> dw);

  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& w() const { return w_; }
  const std::vector<double>& dw() const { return dw_; }
  double amplitude() const { return w_.empty() ? 0.0 : w_.front(); }
  double r_max() const { return r_.empty() ? 0.0 : r_.back(); }
  double tail_coefficient() const { return tail_c_; }

  /// Fitted decay rate stored alongside the profile (see decay_rate).
  double theta = 0;
  /// Radius beyond which samples come from the Bessel tail (shooting only).
  double r_match = 0;

  double value(double r) const;
  double derivative(double r) const;
  bool is_zero() const;

 private:
  std::size_t segment(double r) const;
  double second(std::size_t i) const;

  std::vector<double> r_, w_, dw_;
  double tail_c_ = 0;
};

struct ShootingResult {
  RadialProfile profile;
  double lower = 0;  // largest amplitude found not to cross zero
  double upper = 0;  // smallest amplitude found to cross zero
  StopReason lower_reason = StopReason::ReachedRmax;
  StopReason upper_reason = StopReason::CrossedZero;
  int bisections = 0;
};

/// Ground state of the limit equation by bisection on the amplitude.
/// Bisection continues until the bracket is at least as tight as
/// tol_amplitude and no further floating-point progress is possible.
ShootingResult shoot(double tol_amplitude = 1e-10, double r_max = 25, double integrator_tol = 1e-12);

RadialProfile shoot_ground_state(double tol_amplitude = 1e-10, double r_max = 25,
                                 double integrator_tol = 1e-12);

/// Least-squares slope of -log w(r) on [r_lo, r_hi].
double decay_rate(const RadialProfile& profile, double r_lo, double r_hi);
/// Least-squares slope of -log(w(r) sqrt(r)) on [r_lo, r_hi].
double decay_rate_bessel(const RadialProfile& profile, double r_lo, double r_hi);

/// I(w) = pi * int_0^inf (w'^2 + w^2 - 2 F(w)) r dr.
double energy_I(const RadialProfile& profile);

/// gamma = (2/3) int_0^inf w'(r)^2 r^2 dr.
double gamma_constant(const RadialProfile& profile);

struct PohozaevResiduals {
  double gamma = 0;
  double moment_z1 = 0;   // int_{R^2_+} (dw/dz1)^2 z2
  double moment_z2 = 0;   // int_{R^2_+} (dw/dz2)^2 z2
  double moment_energy = 0;  // int_{R^2_+} ((|grad w|^2 + w^2)/2 - F(w)) z2
  double residual_z1 = 0;      // |moment_z1 / gamma - 1|
  double residual_z2 = 0;      // |moment_z2 / gamma - 2|
  double residual_energy = 0;  // |moment_energy / gamma - 2|
};

/// Half-plane moments by tensor Gauss-Legendre quadrature in polar coordinates.
PohozaevResiduals pohozaev_checks(const RadialProfile& profile);

struct NehariIdentity {
  double quadratic = 0;  // int_{R^2} |grad w|^2 + w^2
  double nonlinear = 0;  // int_{R^2} w^2 (e^{w^2} - 1)
  double relative_residual = 0;
};

NehariIdentity nehari_identity(const RadialProfile& profile);

}  // namespace spike
