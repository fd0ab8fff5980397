#include "spike/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "spike/errors.hpp"

namespace spike {

namespace {

constexpr int kPanels = 4096;
constexpr int kProjectSamples = 2048;

Point rot90(const Point& v) { return {-v.y(), v.x()}; }

double wrap(double s, double L) {
  double r = std::fmod(s, L);
  if (r < 0) r += L;
  return r;
}

}  // namespace

struct Domain::Impl {
  Kind kind = Kind::GenericCurve;
  double L = 0;
  double area = 0;
  double min_rc = 0;

  std::function<Point(double)> c, dc;
  double period = 0;
  std::vector<double> t_knots, s_knots;
  std::vector<double> sample_s;
  std::vector<Point> sample_p;

  double speed(double t) const { return dc(t).norm(); }

  double arc(double ta, double tb) const {
    return boost::math::quadrature::gauss<double, 20>::integrate(
        [this](double t) { return speed(t); }, ta, tb);
  }

  double param_of(double s) const {
    s = wrap(s, L);
    auto it = std::upper_bound(s_knots.begin(), s_knots.end(), s);
    std::size_t j = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - s_knots.begin() - 1, 0),
                                          t_knots.size() - 2);
    double ta = t_knots[j], tb = t_knots[j + 1];
    double sa = s_knots[j], sb = s_knots[j + 1];
    double t = ta + (s - sa) / (sb - sa) * (tb - ta);
    for (int it2 = 0; it2 < 30; ++it2) {
      double f = sa + arc(ta, t) - s;
      double dt = f / speed(t);
      t -= dt;
      if (std::abs(dt) < 1e-15 * period) break;
    }
    return t;
  }

  Point point(double s) const {
    if (kind == Kind::UnitDisk) return {std::sin(s), -std::cos(s)};
    return c(param_of(s));
  }

  Point tangent(double s) const {
    if (kind == Kind::UnitDisk) return {std::cos(s), std::sin(s)};
    return dc(param_of(s)).normalized();
  }

  double curvature(double s) const {
    if (kind == Kind::UnitDisk) return 1.0;
    double h = 1e-4 * L;
    Point d2 = (-point(s + 2 * h) + 16 * point(s + h) - 30 * point(s) + 16 * point(s - h) -
                point(s - 2 * h)) /
               (12 * h * h);
    return d2.dot(rot90(tangent(s)));
  }

  double project(const Point& x) const {
    if (kind == Kind::UnitDisk) return wrap(std::atan2(x.x(), -x.y()), L);
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sample_p.size(); ++i) {
      double dd = (sample_p[i] - x).squaredNorm();
      if (dd < bd) {
        bd = dd;
        best = i;
      }
    }
    double s = sample_s[best];
    double ds_max = L / kProjectSamples;
    for (int it = 0; it < 50; ++it) {
      Point p = point(s);
      Point T = tangent(s);
      double g = (p - x).dot(T);
      double gp = 1.0 + curvature(s) * (p - x).dot(rot90(T));
      double step = gp > 0.1 ? g / gp : g;
      step = std::clamp(step, -ds_max, ds_max);
      s -= step;
      if (std::abs(step) < 1e-15 * L) break;
    }
    return wrap(s, L);
  }
};

Domain Domain::unit_disk() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::UnitDisk;
  impl->L = 2 * std::numbers::pi;
  impl->area = std::numbers::pi;
  impl->min_rc = 1.0;
  return Domain(impl);
}

Domain Domain::ellipse(double a, double b) {
  if (!(a > 0) || !(b > 0)) throw Error(ErrorKind::InvalidParameter, "ellipse semi-axes must be positive");
  return from_parametric([a, b](double t) { return Point(a * std::cos(t), b * std::sin(t)); },
                         [a, b](double t) { return Point(-a * std::sin(t), b * std::cos(t)); },
                         2 * std::numbers::pi);
}

Domain Domain::from_parametric(std::function<Point(double)> curve,
                               std::function<Point(double)> derivative, double period) {
  if (!(period > 0)) throw Error(ErrorKind::InvalidParameter, "curve period must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::GenericCurve;
  impl->c = std::move(curve);
  impl->dc = std::move(derivative);
  impl->period = period;
  impl->t_knots.resize(kPanels + 1);
  impl->s_knots.resize(kPanels + 1);
  double s = 0, area2 = 0;
  for (int j = 0; j <= kPanels; ++j) {
    impl->t_knots[j] = period * j / kPanels;
    if (j > 0) {
      double ta = impl->t_knots[j - 1], tb = impl->t_knots[j];
      if (!(impl->speed(0.5 * (ta + tb)) > 0))
        throw Error(ErrorKind::InvalidParameter, "curve derivative vanishes");
      s += impl->arc(ta, tb);
      area2 += boost::math::quadrature::gauss<double, 20>::integrate(
          [&](double t) {
            Point p = impl->c(t), v = impl->dc(t);
            return p.x() * v.y() - p.y() * v.x();
          },
          ta, tb);
    }
    impl->s_knots[j] = s;
  }
  impl->L = s;
  impl->area = 0.5 * area2;
  if (!(impl->area > 0))
    throw Error(ErrorKind::InvalidParameter, "curve must be oriented counter-clockwise");

  impl->sample_s.resize(kProjectSamples);
  impl->sample_p.resize(kProjectSamples);
  double kmax = 0;
  for (int i = 0; i < kProjectSamples; ++i) {
    double si = impl->L * i / kProjectSamples;
    impl->sample_s[i] = si;
    impl->sample_p[i] = impl->point(si);
  }
  for (int i = 0; i < kProjectSamples; i += 4) kmax = std::max(kmax, std::abs(impl->curvature(impl->sample_s[i])));
  impl->min_rc = kmax > 0 ? 1.0 / kmax : std::numeric_limits<double>::infinity();
  return Domain(impl);
}

Domain::Kind Domain::kind() const { return impl_->kind; }
double Domain::perimeter() const { return impl_->L; }
Point Domain::point(double s) const { return impl_->point(s); }
Point Domain::tangent(double s) const { return impl_->tangent(s); }
Point Domain::inner_normal(double s) const { return rot90(impl_->tangent(s)); }
double Domain::curvature(double s) const { return impl_->curvature(s); }
double Domain::project(const Point& x) const { return impl_->project(x); }
double Domain::min_radius_of_curvature() const { return impl_->min_rc; }
double Domain::area() const { return impl_->area; }

double Domain::distance_to_boundary(const Point& x) const {
  if (impl_->kind == Kind::UnitDisk) return std::abs(1.0 - x.norm());
  return (x - point(project(x))).norm();
}

bool Domain::contains(const Point& x) const {
  if (impl_->kind == Kind::UnitDisk) return x.norm() <= 1.0 + 1e-14;
  double s = project(x);
  return (x - point(s)).dot(inner_normal(s)) >= -1e-14;
}

}  // namespace spike
