#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spike/ground_state.hpp"
#include "spike/test_function.hpp"

namespace spike {

struct RayMaximizer {
  double t0 = 0;      // Nehari root
  double golden = 0;  // golden-section maximizer of t -> J_d(t phi)
};

/// Maximizer of t -> J_d(t phi), with an independent golden-section estimate
/// evaluated in extended precision.
RayMaximizer ray_maximizer_t0(const EnergyFunctional& E, const Eigen::VectorXd& phi);
RayMaximizer ray_maximizer_t0(const Field& phi, double d);

/// Mesh used for a given d in a sweep.
using MeshPolicy = std::function<std::shared_ptr<const Mesh>(double d)>;

/// Unit-disk mesh graded toward P: h = sqrt(d)/cells_per_sqrt_d within 3 sqrt(d).
MeshPolicy disk_mesh_policy(const Point& P, double cells_per_sqrt_d = 16);
/// Box [-L, L] x [0, L] graded toward the origin, for the flat-boundary case.
MeshPolicy half_plane_mesh_policy(double L, double cells_per_sqrt_d = 16);

struct ExpansionEntry {
  double d = 0;
  std::optional<double> m_d;
  double M_test = 0;
  double t0 = 0;
  double t0_golden = 0;
};

struct ExpansionReport {
  std::vector<ExpansionEntry> entries;
  double half_I = 0;
  double gamma = 0;
  double curvature = 0;       // phi''(0) of the chart
  double expected_coeff = 0;  // curvature * gamma
  double fitted_gamma_coeff = 0;
  double fitted_beta = 0;      // t0 - 1 ~ beta sqrt(d)
  double t0_loglog_slope = 0;  // slope of log|t0 - 1| against log d
};

/// Test-function levels along a decreasing list of at least four d values.
/// When a domain is given, the ground state is also solved on each mesh.
ExpansionReport expansion_fit(const std::vector<double>& d_list, const StraighteningChart& chart, double k,
                              const RadialProfile& profile, const MeshPolicy& meshes,
                              const Domain* solve_on = nullptr);

/// Test-function level and Nehari root for one d on a given mesh.
ExpansionEntry expansion_entry(double d, const StraighteningChart& chart, double k, const RadialProfile& profile,
                               std::shared_ptr<const Mesh> mesh);
/// Recomputes the fitted fields of rep from its entries, half_I and curvature.
void refit_expansion(ExpansionReport& rep);

/// Least-squares slope of y = c x through the origin.
double fit_through_origin(const std::vector<double>& x, const std::vector<double>& y);
/// Least-squares slope of y = a + b x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y, double* r_squared = nullptr);

struct ConcentrationMetrics {
  double dist_over_sqrtd = 0;
  /// Over nodes with |Psi(x)| / sqrt(d) <= R, using the chart at the boundary
  /// point that best fits u by the rescaled profile (lumped L2) within two
  /// mesh sizes of the peak node's projection.
  double profile_sup_err = 0;
  double center_shift = 0;     // arclength from the peak node's projection to that point
  double mu1 = 0;              // tail decay rate in the variable |x - P_d| / sqrt(d)
  int patch_nodes = 0;
  int tail_nodes = 0;
};

ConcentrationMetrics concentration_report(const SolveReport& report, const RadialProfile& profile,
                                          const Domain& domain, double R = 5.0);

struct EnergyBudget {
  double value = 0;  // (d |grad u|^2 + |u|^2) / d
  bool pass = false;  // value < 4 pi
};
EnergyBudget scaled_energy_budget(const SolveReport& report);

}  // namespace spike
