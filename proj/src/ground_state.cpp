#include "spike/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "spike/errors.hpp"
#include "spike/test_function.hpp"

namespace spike {

namespace {

void check_ray_field(const Eigen::VectorXd& u) {
  if (u.size() == 0) throw Error(ErrorKind::ZeroField, "empty field");
  if (u.minCoeff() < 0) throw Error(ErrorKind::Precondition, "field must be nonnegative");
  if (u.maxCoeff() <= 0) throw Error(ErrorKind::ZeroField, "field is identically zero");
}

// N(sigma) = sum m_i u_i^2 (e^{sigma u_i^2} - 1) and its derivative.
struct RayNonlinear {
  const Eigen::VectorXd& m;
  const Eigen::VectorXd& u;
  double value(double sigma) const {
    double s = 0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      double q = u[i] * u[i];
      s += m[i] * q * std::expm1(sigma * q);
    }
    return s;
  }
  double slope(double sigma) const {
    double s = 0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      double q = u[i] * u[i];
      s += m[i] * q * q * std::exp(sigma * q);
    }
    return s;
  }
};

}  // namespace

double nehari_scale(const EnergyFunctional& E, const Eigen::VectorXd& u) {
  check_ray_field(u);
  const double umax = u.maxCoeff();
  const double Q = E.quadratic(u);
  RayNonlinear N{E.operators().lumped_mass, u};
  // G(s u) = s^2 (Q - N(s^2)) with N increasing from 0.
  const double sigma_cap = kOverflowThreshold * kOverflowThreshold / (umax * umax);
  double lo = 0, hi = std::min(1.0 / (umax * umax), sigma_cap);
  while (N.value(hi) <= Q) {
    if (hi >= sigma_cap)
      throw Error(ErrorKind::RayBracket, "G_d(s u) keeps its sign up to the overflow threshold");
    lo = hi;
    hi = std::min(2 * hi, sigma_cap);
  }
  double sigma = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    double r = N.value(sigma) - Q;
    if (r == 0) break;
    if (r < 0)
      lo = sigma;
    else
      hi = sigma;
    if (std::abs(r) <= 1e-15 * Q || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) break;
    double next = sigma - r / N.slope(sigma);
    sigma = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
  }
  return std::sqrt(sigma);
}

double nehari_scale(const Field& u, double d) { return nehari_scale(EnergyFunctional(u.mesh, d), u.values); }

RayMaximum max_over_ray(const EnergyFunctional& E, const Eigen::VectorXd& u) {
  RayMaximum out;
  out.t = nehari_scale(E, u);
  out.M = E.energy(out.t * u);
  const double umax = u.maxCoeff();
  out.scan_max = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 1000; ++i) {
    double t = 2 * out.t * i / 1000.0;
    if (t * umax > kOverflowThreshold) break;
    out.scan_max = std::max(out.scan_max, E.energy(t * u));
  }
  if (out.scan_max > out.M + 1e-12)
    throw Error(ErrorKind::Fit, "ray scan found J_d above the Nehari value by " + std::to_string(out.scan_max - out.M));
  return out;
}

RayMaximum max_over_ray(const Field& u, double d) { return max_over_ray(EnergyFunctional(u.mesh, d), u.values); }

std::string to_string(InitPreset p) {
  switch (p) {
    case InitPreset::CurvatureBump:
      return "curvature-bump";
    case InitPreset::Constant:
      return "constant";
    case InitPreset::Custom:
      return "custom";
  }
  return "?";
}

InitPreset init_preset_from_string(const std::string& s) {
  if (s == "curvature-bump") return InitPreset::CurvatureBump;
  if (s == "constant") return InitPreset::Constant;
  if (s == "custom") return InitPreset::Custom;
  throw Error(ErrorKind::InvalidParameter, "unknown init preset '" + s + "'");
}

Field initial_field(InitPreset preset, double d, std::shared_ptr<const Mesh> mesh, const Domain& domain) {
  switch (preset) {
    case InitPreset::Constant:
      return Field(mesh, Eigen::VectorXd::Ones(mesh->num_nodes()));
    case InitPreset::CurvatureBump: {
      Point P = max_curvature_point(domain);
      ChartChoice c = default_chart(domain, P);
      return build_test_function({c.chart, default_profile(), d, c.k}, mesh);
    }
    case InitPreset::Custom:
      break;
  }
  throw Error(ErrorKind::InvalidParameter, "custom init requires a field");
}

SolveReport solve_ground_state(double d, std::shared_ptr<const Mesh> mesh, const Domain& domain,
                               const SolveOptions& options) {
  if (!(d > 0)) throw Error(ErrorKind::InvalidParameter, "diffusion d must be positive");
  Field init = options.init == InitPreset::Custom
                   ? (options.custom_init ? *options.custom_init
                                          : throw Error(ErrorKind::InvalidParameter, "custom init requires a field"))
                   : initial_field(options.init, d, mesh, domain);
  if (init.mesh != mesh && init.mesh->num_nodes() != mesh->num_nodes())
    throw Error(ErrorKind::InvalidParameter, "initial field lives on a different mesh");

  EnergyFunctional E(mesh, d);
  Eigen::VectorXd u = init.values;
  u *= nehari_scale(E, u);
  double J = E.energy(u);

  SolveReport rep;
  rep.d = d;
  auto record = [&](const Eigen::VectorXd& v, double Jv) {
    if (!options.record_history) return;
    rep.energy_history.push_back(Jv);
    rep.nehari_history.push_back(std::abs(E.nehari(v)) / E.quadratic(v));
  };
  record(u, J);

  const double eps = std::numeric_limits<double>::epsilon();
  const bool cg = options.method == DescentMethod::ConjugateGradient;
  int it = 0;
  double gnorm = 0;
  Eigen::VectorXd p, g_old;
  double rg_old = 0;
  for (;; ++it) {
    Eigen::VectorXd r = E.residual(u);
    Eigen::VectorXd g = E.solve(r);
    const double rg = g.dot(r);
    gnorm = std::sqrt(std::max(rg, 0.0));
    if (gnorm <= options.tolerance * std::sqrt(std::max(J, 0.0))) {
      rep.converged = true;
      break;
    }
    if (it >= options.max_iterations) break;

    // Search direction: -g, or Polak-Ribiere+ conjugate direction.
    double beta = 0;
    if (cg && it > 0 && it % options.restart_period != 0) beta = std::max(0.0, r.dot(g - g_old) / rg_old);
    p = beta > 0 ? Eigen::VectorXd(-g + beta * p) : Eigen::VectorXd(-g);
    double slope = r.dot(p);
    if (slope >= 0) {
      p = -g;
      slope = -rg;
    }
    g_old = g;
    rg_old = rg;

    double alpha = 1.0;
    if (cg) {
      // Secant estimate of the minimizing step from a residual difference.
      double h = 1e-6 * std::max(u.cwiseAbs().maxCoeff(), 1e-300) / std::max(p.cwiseAbs().maxCoeff(), 1e-300);
      try {
        double curv = p.dot(E.residual(u + h * p) - r) / h;
        if (curv > 0) alpha = std::clamp(-slope / curv, 1e-3, 1e3);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Overflow) throw;
      }
    }

    bool accepted = false;
    const double noise = 32 * eps * std::abs(J);
    for (int bt = 0; bt <= options.max_backtracks; ++bt, alpha *= 0.5) {
      Eigen::VectorXd v = (u + alpha * p).cwiseMax(0.0);
      if (v.maxCoeff() <= 0) continue;
      double decrease = r.dot(u - v);
      Eigen::VectorXd w;
      double Jw;
      try {
        w = nehari_scale(E, v) * v;
        Jw = E.energy(w);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Overflow || e.kind() == ErrorKind::RayBracket) continue;
        throw;
      }
      // Once the predicted decrease is at the rounding level of J the test
      // only asks that J does not rise beyond that level.
      bool ok = decrease > 1e3 * noise ? Jw <= J - options.armijo_slope * decrease : Jw <= J + noise;
      if (ok) {
        u = std::move(w);
        J = Jw;
        accepted = true;
        break;
      }
    }
    if (!accepted && rg <= 100 * noise) {
      rep.converged = true;
      rep.rounding_floor = true;
      break;
    }
    if (!accepted)
      throw Error(ErrorKind::LineSearch, "no sufficient decrease after " + std::to_string(options.max_backtracks) +
                                             " backtracks at iteration " + std::to_string(it) +
                                             " (grad_norm " + std::to_string(gnorm) + ")");
    record(u, J);
  }

  rep.iterations = it;
  rep.grad_norm = gnorm;
  rep.m_d = J;
  rep.quadratic = E.quadratic(u);
  rep.nehari = E.nehari(u);
  Eigen::Index imax = 0;
  for (Eigen::Index i = 1; i < u.size(); ++i)
    if (u[i] > u[imax]) imax = i;
  rep.peak_index = static_cast<int>(imax);
  rep.peak = mesh->node(rep.peak_index);
  rep.peak_on_boundary = mesh->is_boundary(rep.peak_index);
  rep.dist_to_boundary = rep.peak_on_boundary ? 0.0 : domain.distance_to_boundary(rep.peak);
  rep.u = Field(mesh, std::move(u));
  return rep;
}

BracketCheck energy_bracket_check(const SolveReport& report) {
  BracketCheck c;
  c.m_d = report.m_d;
  c.pi_d = std::numbers::pi * report.d;
  c.lower_margin = c.m_d;
  c.upper_margin = c.pi_d - c.m_d;
  c.pass = c.m_d > 0 && c.m_d < c.pi_d;
  return c;
}

LocalMaxima count_local_maxima(const Field& u, double threshold) {
  LocalMaxima out;
  const Mesh& mesh = *u.mesh;
  const double level = threshold * u.max();
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    double ui = u.values[static_cast<Eigen::Index>(i)];
    if (ui < level) continue;
    const auto& nb = mesh.neighbors(static_cast<int>(i));
    if (nb.empty()) continue;
    bool strict = std::all_of(nb.begin(), nb.end(), [&](int j) { return ui > u.values[j]; });
    if (!strict) continue;
    out.nodes.push_back(static_cast<int>(i));
    out.locations.push_back(mesh.node(static_cast<int>(i)));
  }
  out.count = static_cast<int>(out.nodes.size());
  return out;
}

std::string report_json(const SolveReport& r) {
  nlohmann::ordered_json j;
  j["d"] = r.d;
  j["m_d"] = r.m_d;
  j["peak_x"] = r.peak.x();
  j["peak_y"] = r.peak.y();
  j["peak_on_boundary"] = r.peak_on_boundary;
  j["dist_to_boundary"] = r.dist_to_boundary;
  j["iterations"] = r.iterations;
  j["grad_norm"] = r.grad_norm;
  return j.dump(2);
}

}  // namespace spike
