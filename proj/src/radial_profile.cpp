#include "spike/radial_profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>

#include "spike/errors.hpp"

namespace spike {

namespace odeint = boost::numeric::odeint;

double Nonlinearity::f(double w) { return w * std::expm1(w * w); }

double Nonlinearity::F(double w) {
  const double x = w * w;
  if (x < 0.5) {
    // sum_{k >= 2} x^k / k!
    double term = 0.5 * x * x, sum = 0;
    for (int k = 2; k < 40 && term > 1e-18 * sum; ++k) {
      sum += term;
      term *= x / (k + 1);
    }
    return 0.5 * sum;
  }
  return 0.5 * (std::expm1(x) - x);
}

double Nonlinearity::df(double w) {
  const double x = w * w;
  return std::expm1(x) + 2 * x * std::exp(x);
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Decayed: return "decayed";
    case StopReason::CrossedZero: return "crossed-zero";
    case StopReason::TurnedUp: return "turned-up";
    case StopReason::ReachedRmax: return "reached-rmax";
  }
  return "unknown";
}

namespace {

using State = std::array<double, 2>;

struct RadialSystem {
  void operator()(const State& y, State& dy, double r) const {
    dy[0] = y[1];
    dy[1] = y[0] * (1.0 - std::expm1(y[0] * y[0])) - y[1] / r;
  }
};

struct StopSignal {
  StopReason reason;
};

// Modified Bessel functions of the second kind, zero where they underflow.
double k0(double r) { return r > 700 ? 0.0 : std::cyl_bessel_k(0.0, r); }
double k1(double r) { return r > 700 ? 0.0 : std::cyl_bessel_k(1.0, r); }

// Two-term series start radius; shrinks for amplitudes with a large curvature at the origin.
double series_start(double a) {
  double c = std::abs(2.0 - std::exp(a * a));
  return c > 0 ? std::min(1e-4, 2e-3 / std::sqrt(c)) : 1e-4;
}

}  // namespace

Trajectory integrate_radial(double amplitude, double r_max, double tol, double dr) {
  if (!(amplitude > 0)) throw Error(ErrorKind::InvalidParameter, "amplitude must be positive");
  if (!(tol > 1e-14 && tol < 1e-6)) throw Error(ErrorKind::InvalidParameter, "tol must lie in (1e-14, 1e-6)");
  if (!(r_max > 0) || !(dr > 0)) throw Error(ErrorKind::InvalidParameter, "r_max and dr must be positive");
  if (amplitude > 26) throw Error(ErrorKind::Overflow, "amplitude too large for e^{w^2}");

  const int n = std::max(1, static_cast<int>(std::lround(r_max / dr)));
  const double h = r_max / n;
  const double a = amplitude;
  const double c2 = 0.25 * a * (2.0 - std::exp(a * a));
  const double r0 = std::min(series_start(a), 0.5 * h);

  Trajectory tr;
  tr.r.reserve(n + 1);
  tr.w.reserve(n + 1);
  tr.dw.reserve(n + 1);
  tr.r.push_back(0.0);
  tr.w.push_back(a);
  tr.dw.push_back(0.0);

  std::vector<double> times(n + 1);
  times[0] = r0;
  for (int i = 1; i <= n; ++i) times[i] = h * i;

  State y{a + c2 * r0 * r0, 2 * c2 * r0};
  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(tol * 1e-6, tol);
  auto observer = [&](const State& s, double r) {
    if (r == r0) return;
    if (!std::isfinite(s[0]) || !std::isfinite(s[1]))
      throw Error(ErrorKind::Overflow, "non-finite radial state at r = " + std::to_string(r));
    tr.r.push_back(r);
    tr.w.push_back(s[0]);
    tr.dw.push_back(s[1]);
    if (s[0] < 0) throw StopSignal{StopReason::CrossedZero};
    if (s[0] > 2 * a || (s[1] > 1e-12 && s[0] > 0)) throw StopSignal{StopReason::TurnedUp};
    if (s[0] < 1e-8 && std::abs(s[1]) < 1e-8) throw StopSignal{StopReason::Decayed};
  };
  try {
    odeint::integrate_times(stepper, RadialSystem{}, y, times.begin(), times.end(), std::min(1e-6, r0), observer);
    tr.reason = StopReason::ReachedRmax;
  } catch (const StopSignal& s) {
    tr.reason = s.reason;
  } catch (const odeint::step_adjustment_error&) {
    throw Error(ErrorKind::Overflow, "radial integration step size collapsed");
  } catch (const odeint::no_progress_error&) {
    throw Error(ErrorKind::Overflow, "radial integration made no progress");
  }
  return tr;
}

RadialProfile::RadialProfile(std::vector<double> r, std::vector<double> w, std::vector<double> dw)
    : r_(std::move(r)), w_(std::move(w)), dw_(std::move(dw)) {
  if (r_.size() < 2 || w_.size() != r_.size() || dw_.size() != r_.size())
    throw Error(ErrorKind::InvalidParameter, "profile needs matching r, w, dw arrays of length >= 2");
  if (r_.front() != 0.0) throw Error(ErrorKind::InvalidParameter, "profile grid must start at r = 0");
  for (std::size_t i = 1; i < r_.size(); ++i)
    if (!(r_[i] > r_[i - 1])) throw Error(ErrorKind::InvalidParameter, "profile grid must be increasing");
  for (std::size_t i = 0; i < r_.size(); ++i)
    if (!std::isfinite(w_[i]) || !std::isfinite(dw_[i]))
      throw Error(ErrorKind::InvalidParameter, "profile values must be finite");

  // Tail coefficient from the last five length units (when available and positive).
  double rm = r_.back();
  double sum = 0;
  int count = 0;
  for (std::size_t i = 0; i < r_.size(); ++i) {
    if (r_[i] < rm - 5 || r_[i] <= 0) continue;
    if (!(w_[i] > 0)) {
      count = 0;
      break;
    }
    sum += w_[i] / k0(r_[i]);
    ++count;
  }
  tail_c_ = (rm >= 10 && count > 0) ? sum / count : 0.0;
}

std::size_t RadialProfile::segment(double r) const {
  auto it = std::upper_bound(r_.begin(), r_.end(), r);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - r_.begin() - 1, 0));
  return std::min(i, r_.size() - 2);
}

double RadialProfile::value(double r) const {
  if (r_.empty()) return 0.0;
  r = std::abs(r);
  if (r > r_.back()) return tail_c_ > 0 ? tail_c_ * k0(r) : 0.0;
  std::size_t i = segment(r);
  double h = r_[i + 1] - r_[i], t = (r - r_[i]) / h;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * w_[i] + h10 * h * dw_[i] + h01 * w_[i + 1] + h11 * h * dw_[i + 1];
}

double RadialProfile::derivative(double r) const {
  if (r_.empty()) return 0.0;
  r = std::abs(r);
  if (r > r_.back()) return tail_c_ > 0 ? -tail_c_ * k1(r) : 0.0;
  std::size_t i = segment(r);
  double h = r_[i + 1] - r_[i], t = (r - r_[i]) / h;
  double d00 = 6 * t * (t - 1), d10 = (1 - t) * (1 - 3 * t);
  double d01 = -6 * t * (t - 1), d11 = t * (3 * t - 2);
  return (d00 * w_[i] + d01 * w_[i + 1]) / h + d10 * dw_[i] + d11 * dw_[i + 1];
}

bool RadialProfile::is_zero() const {
  return std::all_of(w_.begin(), w_.end(), [](double v) { return v == 0.0; }) &&
         std::all_of(dw_.begin(), dw_.end(), [](double v) { return v == 0.0; });
}

ShootingResult shoot(double tol_amplitude, double r_max, double integrator_tol) {
  if (!(tol_amplitude > 0)) throw Error(ErrorKind::InvalidParameter, "tol_amplitude must be positive");
  if (!(r_max >= 20))
    throw Error(ErrorKind::Bracket, "r_max = " + std::to_string(r_max) +
                                        " is too short to separate decaying from crossing trajectories (need >= 20)");

  auto crosses = [&](double a, Trajectory* keep) {
    Trajectory t;
    try {
      t = integrate_radial(a, r_max, integrator_tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Overflow) throw;
      t.reason = StopReason::CrossedZero;
    }
    bool c = t.reason == StopReason::CrossedZero;
    if (keep) *keep = std::move(t);
    return c;
  };

  const double a_lo = std::sqrt(std::numbers::ln2) + 0.01, a_hi = 6.0;
  const int scan = 60;
  double lo = std::numeric_limits<double>::quiet_NaN(), hi = lo;
  double prev = a_lo;
  for (int j = 0; j < scan; ++j) {
    double a = a_lo + (a_hi - a_lo) * j / (scan - 1);
    if (crosses(a, nullptr)) {
      if (j == 0) break;
      lo = prev;
      hi = a;
      break;
    }
    prev = a;
  }
  if (std::isnan(lo))
    throw Error(ErrorKind::Bracket, "no sign change in the amplitude scan over (sqrt(ln 2) + 0.01, 6)");

  ShootingResult res;
  Trajectory tlo, thi;
  crosses(lo, &tlo);
  crosses(hi, &thi);
  while (true) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || res.bisections >= 200) break;
    Trajectory tm;
    if (crosses(mid, &tm)) {
      hi = mid;
      thi = std::move(tm);
    } else {
      lo = mid;
      tlo = std::move(tm);
    }
    ++res.bisections;
  }
  if (hi - lo > tol_amplitude) throw Error(ErrorKind::Bracket, "bisection stalled above the requested tolerance");
  res.lower = lo;
  res.upper = hi;
  res.lower_reason = tlo.reason;
  res.upper_reason = thi.reason;

  // Trust the lower trajectory up to where the two bracket ends separate; beyond
  // that use the decaying Bessel tail c K0(r).
  std::size_t n_common = std::min(tlo.r.size(), thi.r.size());
  std::size_t m = 0;
  while (m + 1 < n_common && std::abs(tlo.w[m + 1] - thi.w[m + 1]) <= 1e-6 * std::abs(tlo.w[m + 1]) &&
         tlo.w[m + 1] > 0)
    ++m;
  double r_match = tlo.r[m];
  if (r_match < 10)
    throw Error(ErrorKind::Fit, "bracket trajectories separate at r = " + std::to_string(r_match) +
                                    ", too early for a tail fit");
  double sum = 0;
  int count = 0;
  for (std::size_t i = 0; i <= m; ++i)
    if (tlo.r[i] >= r_match - 5) {
      sum += tlo.w[i] / k0(tlo.r[i]);
      ++count;
    }
  const double c = sum / count;

  const int n = std::max(1, static_cast<int>(std::lround(r_max / 0.0025)));
  const double h = r_max / n;
  std::vector<double> r(n + 1), w(n + 1), dw(n + 1);
  for (int i = 0; i <= n; ++i) {
    r[i] = h * i;
    if (static_cast<std::size_t>(i) <= m) {
      w[i] = tlo.w[i];
      dw[i] = tlo.dw[i];
    } else {
      w[i] = c * k0(r[i]);
      dw[i] = -c * k1(r[i]);
    }
  }
  res.profile = RadialProfile(std::move(r), std::move(w), std::move(dw));
  res.profile.r_match = r_match;
  res.profile.theta = decay_rate(res.profile, 10.0, 15.0);
  return res;
}

RadialProfile shoot_ground_state(double tol_amplitude, double r_max, double integrator_tol) {
  return shoot(tol_amplitude, r_max, integrator_tol).profile;
}

namespace {

double log_slope(const RadialProfile& p, double r_lo, double r_hi, bool bessel) {
  if (!(r_lo >= 5) || !(r_hi > r_lo) || r_hi > p.r_max() + 1e-12)
    throw Error(ErrorKind::InvalidParameter, "fit window must satisfy 5 <= r_lo < r_hi <= r_max");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < p.r().size(); ++i) {
    double r = p.r()[i];
    if (r < r_lo || r > r_hi) continue;
    double w = p.w()[i];
    if (!(w > 0)) throw Error(ErrorKind::Fit, "nonpositive profile value in the fit window at r = " + std::to_string(r));
    double y = -std::log(bessel ? w * std::sqrt(r) : w);
    sx += r;
    sy += y;
    sxx += r * r;
    sxy += r * y;
    ++n;
  }
  if (n < 2) throw Error(ErrorKind::Fit, "fewer than two grid points in the fit window");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// int_0^inf g(r, w, w') dr: per-segment Simpson on the grid plus the Bessel tail.
template <class G>
double radial_integral(const RadialProfile& p, G g) {
  const auto& r = p.r();
  double sum = 0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    double a = r[i], b = r[i + 1], m = 0.5 * (a + b);
    sum += (b - a) / 6 *
           (g(a, p.w()[i], p.dw()[i]) + 4 * g(m, p.value(m), p.derivative(m)) + g(b, p.w()[i + 1], p.dw()[i + 1]));
  }
  if (p.tail_coefficient() > 0) {
    boost::math::quadrature::exp_sinh<double> integrator;
    sum += integrator.integrate([&](double t) { return g(t, p.value(t), p.derivative(t)); }, p.r_max(),
                                std::numeric_limits<double>::infinity());
  }
  return sum;
}

}  // namespace

double decay_rate(const RadialProfile& profile, double r_lo, double r_hi) {
  return log_slope(profile, r_lo, r_hi, false);
}

double decay_rate_bessel(const RadialProfile& profile, double r_lo, double r_hi) {
  return log_slope(profile, r_lo, r_hi, true);
}

double energy_I(const RadialProfile& profile) {
  if (profile.is_zero()) return 0.0;
  return std::numbers::pi * radial_integral(profile, [](double r, double w, double dw) {
           return (dw * dw + w * w - 2 * Nonlinearity::F(w)) * r;
         });
}

double gamma_constant(const RadialProfile& profile) {
  if (profile.is_zero()) return 0.0;
  return 2.0 / 3.0 * radial_integral(profile, [](double r, double, double dw) { return dw * dw * r * r; });
}

NehariIdentity nehari_identity(const RadialProfile& profile) {
  NehariIdentity out;
  if (profile.is_zero()) return out;
  const double two_pi = 2 * std::numbers::pi;
  out.quadratic = two_pi * radial_integral(profile, [](double r, double w, double dw) { return (dw * dw + w * w) * r; });
  out.nonlinear = two_pi * radial_integral(profile, [](double r, double w, double) { return w * w * std::expm1(w * w) * r; });
  out.relative_residual = std::abs(out.quadratic - out.nonlinear) / out.quadratic;
  return out;
}

PohozaevResiduals pohozaev_checks(const RadialProfile& profile) {
  PohozaevResiduals out;
  out.gamma = gamma_constant(profile);
  if (out.gamma == 0.0) return out;

  using GL = boost::math::quadrature::gauss<double, 20>;
  using GA = boost::math::quadrature::gauss<double, 30>;
  const double pi = std::numbers::pi;
  const double panel = 0.25;
  const double r_end = profile.r_max() + 15.0;
  const int panels = static_cast<int>(std::ceil(r_end / panel));

  // Tensor product: radial Gauss-Legendre panels times an angular rule on (0, pi).
  std::vector<double> th, wt;
  for (std::size_t k = 0; k < GA::abscissa().size(); ++k) {
    double x = GA::abscissa()[k], wk = GA::weights()[k];
    for (double s : {x, -x}) {
      if (k == 0 && s == -x && x == 0) continue;
      th.push_back(0.5 * pi * (1 + s));
      wt.push_back(0.5 * pi * wk);
    }
  }
  double m1 = 0, m2 = 0, m3 = 0;
  for (int p = 0; p < panels; ++p) {
    double a = p * panel, b = std::min(r_end, a + panel);
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < GL::abscissa().size(); ++k) {
      double x = GL::abscissa()[k], wk = GL::weights()[k];
      for (double s : {x, -x}) {
        if (k == 0 && s == -x && x == 0) continue;
        double r = mid + half * s, wr = half * wk;
        double w = profile.value(r), dw = profile.derivative(r);
        double e = 0.5 * (dw * dw + w * w) - Nonlinearity::F(w);
        for (std::size_t j = 0; j < th.size(); ++j) {
          double c = std::cos(th[j]), sn = std::sin(th[j]);
          double z2 = r * sn, jac = r * wr * wt[j];
          double g1 = dw * c, g2 = dw * sn;
          m1 += g1 * g1 * z2 * jac;
          m2 += g2 * g2 * z2 * jac;
          m3 += e * z2 * jac;
        }
      }
    }
  }
  out.moment_z1 = m1;
  out.moment_z2 = m2;
  out.moment_energy = m3;
  out.residual_z1 = std::abs(m1 / out.gamma - 1);
  out.residual_z2 = std::abs(m2 / out.gamma - 2);
  out.residual_energy = std::abs(m3 / out.gamma - 2);
  return out;
}

}  // namespace spike
