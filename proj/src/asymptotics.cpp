#include "spike/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "spike/errors.hpp"

namespace spike {

namespace {

long double F_ext(long double x) {
  long double q = x * x;
  if (q < 0.5L) {
    // (e^q - 1 - q) / 2 = sum_{j>=2} q^j / (2 j!)
    long double term = q * q / 2, sum = 0;
    for (int j = 2; j < 40 && term > 1e-22L * sum; ++j) {
      sum += term;
      term *= q / (j + 1);
    }
    return sum / 2;
  }
  return (std::expm1(q) - q) / 2;
}

// h(t) = t^2 Q / 2 - sum m_i F(t phi_i), Kahan-summed in long double.
struct RayEnergy {
  const Eigen::VectorXd& m;
  const Eigen::VectorXd& phi;
  long double Q;
  long double operator()(long double t) const {
    long double s = 0, c = 0;
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
      long double y = static_cast<long double>(m[i]) * F_ext(t * phi[i]) - c;
      long double nt = s + y;
      c = (nt - s) - y;
      s = nt;
    }
    return t * t * Q / 2 - s;
  }
};

}  // namespace

RayMaximizer ray_maximizer_t0(const EnergyFunctional& E, const Eigen::VectorXd& phi) {
  RayMaximizer out;
  out.t0 = nehari_scale(E, phi);
  const Eigen::VectorXd Aphi = E.system() * phi;
  long double Q = 0;
  for (Eigen::Index i = 0; i < phi.size(); ++i) Q += static_cast<long double>(phi[i]) * Aphi[i];
  RayEnergy h{E.operators().lumped_mass, phi, Q};

  const long double g = (std::sqrt(5.0L) - 1) / 2;
  long double a = 0.5L * out.t0, b = 1.5L * out.t0;
  long double x1 = b - g * (b - a), x2 = a + g * (b - a);
  long double f1 = h(x1), f2 = h(x2);
  while (b - a > 1e-13L * out.t0) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = h(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = h(x1);
    }
  }
  out.golden = static_cast<double>((a + b) / 2);
  return out;
}

RayMaximizer ray_maximizer_t0(const Field& phi, double d) {
  return ray_maximizer_t0(EnergyFunctional(phi.mesh, d), phi.values);
}

MeshPolicy disk_mesh_policy(const Point& P, double cells_per_sqrt_d) {
  return [P, cells_per_sqrt_d](double d) {
    double sd = std::sqrt(d);
    return std::make_shared<const Mesh>(build_graded_disk_mesh(1.0, 0.1, P, sd / cells_per_sqrt_d, 3 * sd));
  };
}

MeshPolicy half_plane_mesh_policy(double L, double cells_per_sqrt_d) {
  return [L, cells_per_sqrt_d](double d) {
    double sd = std::sqrt(d);
    return std::make_shared<const Mesh>(
        build_graded_rectangle_mesh(-L, L, 0, L, L / 10, Point(0, 0), sd / cells_per_sqrt_d, 3 * sd));
  };
}

double fit_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
  }
  if (!(sxx > 0)) throw Error(ErrorKind::Fit, "degenerate abscissae");
  return sxy / sxx;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y, double* r_squared) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorKind::Fit, "need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0)) throw Error(ErrorKind::Fit, "degenerate abscissae");
  if (r_squared) *r_squared = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return sxy / sxx;
}

ExpansionReport expansion_fit(const std::vector<double>& d_list, const StraighteningChart& chart, double k,
                              const RadialProfile& profile, const MeshPolicy& meshes, const Domain* solve_on) {
  if (d_list.size() < 4) throw Error(ErrorKind::InvalidParameter, "expansion fit needs at least four d values");
  for (std::size_t i = 0; i < d_list.size(); ++i) {
    if (!(d_list[i] > 0)) throw Error(ErrorKind::InvalidParameter, "d values must be positive");
    if (i > 0 && !(d_list[i] < d_list[i - 1]))
      throw Error(ErrorKind::InvalidParameter, "d values must be strictly decreasing");
  }
  ExpansionReport rep;
  rep.half_I = 0.5 * energy_I(profile);
  rep.gamma = gamma_constant(profile);
  rep.curvature = chart.phi2_at_0();
  rep.expected_coeff = rep.curvature * rep.gamma;

  for (double d : d_list) {
    auto mesh = meshes(d);
    ExpansionEntry e = expansion_entry(d, chart, k, profile, mesh);
    if (solve_on) {
      SolveOptions o;
      o.custom_init = build_test_function({chart, profile, d, k}, mesh);
      o.init = InitPreset::Custom;
      e.m_d = solve_ground_state(d, mesh, *solve_on, o).m_d;
    }
    rep.entries.push_back(e);
  }
  refit_expansion(rep);
  return rep;
}

ExpansionEntry expansion_entry(double d, const StraighteningChart& chart, double k, const RadialProfile& profile,
                               std::shared_ptr<const Mesh> mesh) {
  Field phi = build_test_function({chart, profile, d, k}, mesh);
  EnergyFunctional E(mesh, d);
  ExpansionEntry e;
  e.d = d;
  RayMaximizer r = ray_maximizer_t0(E, phi.values);
  e.t0 = r.t0;
  e.t0_golden = r.golden;
  e.M_test = E.energy(r.t0 * phi.values);
  return e;
}

void refit_expansion(ExpansionReport& rep) {
  if (rep.entries.size() < 2) throw Error(ErrorKind::InvalidParameter, "fits need at least two d values");
  std::vector<double> sd, y, dt, logd, logt;
  for (const auto& e : rep.entries) {
    sd.push_back(std::sqrt(e.d));
    y.push_back(rep.half_I - e.M_test / e.d);
    dt.push_back(e.t0 - 1);
    logd.push_back(std::log(e.d));
    logt.push_back(std::log(std::abs(e.t0 - 1)));
  }
  rep.fitted_gamma_coeff = fit_through_origin(sd, y);
  rep.fitted_beta = fit_through_origin(sd, dt);
  rep.t0_loglog_slope = fit_slope(logd, logt);
}

ConcentrationMetrics concentration_report(const SolveReport& report, const RadialProfile& profile,
                                          const Domain& domain, double R) {
  if (!report.u) throw Error(ErrorKind::Precondition, "report carries no field");
  const Field& u = *report.u;
  const Mesh& mesh = *u.mesh;
  const double sd = std::sqrt(report.d);
  ConcentrationMetrics out;
  out.dist_over_sqrtd = report.dist_to_boundary / sd;

  // Centre: boundary point within two local mesh sizes of the peak node's
  // projection that best fits u by the rescaled profile in lumped L2.
  const double s0 = domain.project(report.peak);
  double h_loc = 0;
  for (int j : mesh.neighbors(report.peak_index))
    h_loc = std::max(h_loc, (mesh.node(j) - report.peak).norm());
  const double reach0 = std::min(R * sd, default_chart(domain, domain.point(s0)).chart.radius());
  std::vector<int> near;
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
    if ((mesh.node(static_cast<int>(i)) - report.peak).norm() <= reach0 + 4 * h_loc + report.dist_to_boundary)
      near.push_back(static_cast<int>(i));
  const Eigen::VectorXd m = assemble(mesh).lumped_mass;
  auto misfit = [&](double s) {
    ChartChoice c = default_chart(domain, domain.point(s));
    const double reach = std::min(R * sd, c.chart.radius());
    double sum = 0;
    for (int i : near)
      if (auto z = c.chart.try_inverse(mesh.node(i)); z && z->norm() <= reach) {
        double e = u.values[i] - profile.value(z->norm() / sd);
        sum += m[i] * e * e;
      }
    return sum;
  };
  const double s_best =
      boost::math::tools::brent_find_minima(misfit, s0 - 2 * h_loc, s0 + 2 * h_loc, 40).first;
  out.center_shift = s_best - s0;

  ChartChoice c = default_chart(domain, domain.point(s_best));
  const double reach = std::min(R * sd, c.chart.radius());
  for (int i : near)
    if (auto z = c.chart.try_inverse(mesh.node(i)); z && z->norm() <= reach) {
      out.profile_sup_err = std::max(out.profile_sup_err, std::abs(u.values[i] - profile.value(z->norm() / sd)));
      ++out.patch_nodes;
    }

  std::vector<double> rho, logu;
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const Point& x = mesh.node(static_cast<int>(i));
    double ui = u.values[static_cast<Eigen::Index>(i)];
    double dist = (x - report.peak).norm();
    double r = dist / sd;
    if (r >= R && r <= R + 5 && ui > 1e-300) {
      rho.push_back(r);
      logu.push_back(std::log(ui));
    }
  }
  out.tail_nodes = static_cast<int>(rho.size());
  if (rho.size() < 3) throw Error(ErrorKind::Fit, "too few nodes in the tail annulus");
  out.mu1 = -fit_slope(rho, logu);
  return out;
}

EnergyBudget scaled_energy_budget(const SolveReport& report) {
  EnergyBudget b;
  b.value = report.quadratic / report.d;
  b.pass = b.value < 4 * std::numbers::pi;
  return b;
}

}  // namespace spike
