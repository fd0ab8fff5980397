#include "spike/moser.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "spike/asymptotics.hpp"
#include "spike/errors.hpp"

namespace spike {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxExponent = 700.0;

void check_alpha(double alpha) {
  if (!(alpha >= 0) || !std::isfinite(alpha)) throw Error(ErrorKind::InvalidParameter, "alpha must be nonnegative");
}

// v^2 (e^{alpha v^2} - 1) with the overflow check.
double tm_integrand(double v2, double alpha) {
  double e = alpha * v2;
  if (e > kMaxExponent)
    throw Error(ErrorKind::Overflow, "alpha v^2 = " + std::to_string(e) + " overflows at plateau value " +
                                         std::to_string(std::sqrt(v2)));
  return v2 * std::expm1(e);
}

}  // namespace

MoserFunction::MoserFunction(double eps, double delta) : eps_(eps), delta_(delta), L_(-std::log(eps)) {
  if (!(eps > 0 && eps < 1)) throw Error(ErrorKind::InvalidParameter, "eps must lie in (0, 1)");
  if (!(delta > 0) || !std::isfinite(delta)) throw Error(ErrorKind::InvalidParameter, "delta must be positive");
}

double MoserFunction::plateau() const { return std::sqrt(L_ / (2 * kPi)); }

double MoserFunction::value(double r) const {
  if (r < 0) throw Error(ErrorKind::InvalidParameter, "radius must be nonnegative");
  if (r >= delta_) return 0.0;
  if (r <= delta_ * std::sqrt(eps_)) return plateau();
  return std::sqrt(2 / (kPi * L_)) * std::log(delta_ / r);
}

double MoserFunction::dirichlet() const {
  // pi int (c / r)^2 r dr over [delta sqrt(eps), delta] with c^2 = 2 / (pi L).
  return kPi * (2 / (kPi * L_)) * (L_ / 2);
}

double MoserFunction::l2_squared() const {
  const double d2 = delta_ * delta_;
  double plateau_part = kPi * eps_ * d2 / 2 * (L_ / (2 * kPi));
  // With s = log(delta/r): pi c^2 delta^2 int_0^{L/2} s^2 e^{-2s} ds.
  const double S = L_ / 2;
  double moment = 0.25 - std::exp(-2 * S) * (S * S / 2 + S / 2 + 0.25);
  double ramp = kPi * (2 / (kPi * L_)) * d2 * moment;
  return plateau_part + ramp;
}

double MoserFunction::h1_norm() const { return std::sqrt(dirichlet() + l2_squared()); }

double moser_eval(double eps, double delta, const Point& x, const Point& p) {
  MoserFunction u(eps, delta);
  double r = (x - p).norm();
  if (r > delta * (1 + 1e-12)) throw Error(ErrorKind::InvalidParameter, "point lies outside the model half disk");
  return u.value(r);
}

double tm_functional(const MoserFunction& u, double alpha) {
  check_alpha(alpha);
  if (alpha == 0) return 0.0;
  const double N2 = u.dirichlet() + u.l2_squared();
  const double d2 = u.delta() * u.delta();
  const double P2 = u.plateau() * u.plateau() / N2;
  double plateau_part = kPi * u.eps() * d2 / 2 * tm_integrand(P2, alpha);
  // Ramp in s = log(delta / r): area element pi delta^2 e^{-2s} ds.
  const double c2 = 2 / (kPi * u.log_inv_eps()) / N2;
  auto f = [&](double s) { return kPi * d2 * std::exp(-2 * s) * tm_integrand(c2 * s * s, alpha); };
  const double S = u.log_inv_eps() / 2;
  double ramp = 0;
  const int pieces = 16;
  for (int i = 0; i < pieces; ++i)
    ramp += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, S * i / pieces, S * (i + 1) / pieces, 15,
                                                                          1e-13);
  return plateau_part + ramp;
}

double tm_functional(const Field& u, double alpha) {
  check_alpha(alpha);
  AssembledOperators ops = assemble(*u.mesh);
  double n2 = u.values.dot(ops.stiffness * u.values) + u.values.dot(ops.mass * u.values);
  if (n2 == 0 || alpha == 0) return 0.0;
  double s = 0;
  for (Eigen::Index i = 0; i < u.values.size(); ++i) s += ops.lumped_mass[i] * tm_integrand(u.values[i] * u.values[i] / n2, alpha);
  return s;
}

std::string to_string(Growth g) {
  switch (g) {
    case Growth::Bounded:
      return "bounded";
    case Growth::Diverging:
      return "diverging";
    case Growth::Indeterminate:
      return "indeterminate";
  }
  return "?";
}

SharpnessTable sharpness_sweep(const std::vector<double>& alphas, const std::vector<double>& eps_list, double delta) {
  if (eps_list.size() < 2) throw Error(ErrorKind::InvalidParameter, "need at least two eps values");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) throw Error(ErrorKind::InvalidParameter, "eps values must decrease");
  if (std::log10(eps_list.front() / eps_list.back()) < 3 - 1e-9)
    throw Error(ErrorKind::InvalidParameter, "eps values must cover at least four decades (first/last >= 1e3)");

  SharpnessTable t;
  t.eps = eps_list;
  std::vector<double> logs;
  for (double e : eps_list) logs.push_back(-std::log(e));
  for (double alpha : alphas) {
    SharpnessRow row;
    row.alpha = alpha;
    for (double e : eps_list) row.values.push_back(tm_functional(MoserFunction(e, delta), alpha));
    row.slope = fit_slope(logs, row.values, &row.r_squared);
    double first = row.values.front(), last = row.values.back();
    row.ratio = first > 0 ? last / first : (last > 0 ? INFINITY : 1.0);
    if (row.ratio <= 2)
      row.growth = Growth::Bounded;
    else if (row.slope > 0 && row.r_squared > 0.9)
      row.growth = Growth::Diverging;
    else
      row.growth = Growth::Indeterminate;
    t.rows.push_back(row);
  }
  return t;
}

}  // namespace spike
