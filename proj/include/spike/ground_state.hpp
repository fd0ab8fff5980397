#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spike/domain.hpp"
#include "spike/fem.hpp"

namespace spike {

/// Positive t with G_d(t u) = 0. u must be nonnegative and nonzero.
double nehari_scale(const EnergyFunctional& E, const Eigen::VectorXd& u);
double nehari_scale(const Field& u, double d);

struct RayMaximum {
  double t = 0;         // maximizer t*
  double M = 0;         // J_d(t* u)
  double scan_max = 0;  // largest J_d(t u) on the 1000-point grid over (0, 2 t*]
};

/// sup_{t >= 0} J_d(t u), with a grid scan confirming the maximizer.
RayMaximum max_over_ray(const EnergyFunctional& E, const Eigen::VectorXd& u);
RayMaximum max_over_ray(const Field& u, double d);

enum class DescentMethod { SteepestDescent, ConjugateGradient };

enum class InitPreset { CurvatureBump, Constant, Custom };

std::string to_string(InitPreset p);
InitPreset init_preset_from_string(const std::string& s);

struct SolveOptions {
  InitPreset init = InitPreset::CurvatureBump;
  std::optional<Field> custom_init;
  int max_iterations = 5000;
  double tolerance = 1e-8;  // relative to sqrt(m_d)
  double armijo_slope = 1e-4;
  int max_backtracks = 30;
  DescentMethod method = DescentMethod::ConjugateGradient;
  int restart_period = 50;
  bool record_history = false;
};

struct SolveReport {
  double d = 0;
  std::optional<Field> u;
  double m_d = 0;
  Point peak = Point::Zero();
  int peak_index = -1;
  bool peak_on_boundary = false;
  double dist_to_boundary = 0;
  int iterations = 0;
  double grad_norm = 0;
  bool converged = false;
  /// Stopped above the gradient tolerance because no step changed J by more
  /// than its rounding level; the squared gradient norm was below 100 times
  /// that level.
  bool rounding_floor = false;
  double quadratic = 0;  // d |grad u|^2 + |u|^2
  double nehari = 0;     // G_d(u)
  std::vector<double> energy_history;
  std::vector<double> nehari_history;  // |G_d| / quadratic after each accepted step
};

/// Nehari-constrained projected H^1 gradient descent. The mesh must discretize
/// the given domain.
SolveReport solve_ground_state(double d, std::shared_ptr<const Mesh> mesh, const Domain& domain,
                               const SolveOptions& options = {});

/// Initial field for a preset (before Nehari scaling).
Field initial_field(InitPreset preset, double d, std::shared_ptr<const Mesh> mesh, const Domain& domain);

struct BracketCheck {
  bool pass = false;
  double m_d = 0;
  double pi_d = 0;
  double lower_margin = 0;  // m_d
  double upper_margin = 0;  // pi d - m_d
};
BracketCheck energy_bracket_check(const SolveReport& report);

struct LocalMaxima {
  int count = 0;
  std::vector<int> nodes;
  std::vector<Point> locations;
};
/// Nodes strictly above all mesh neighbours and at least threshold * max(u).
LocalMaxima count_local_maxima(const Field& u, double threshold = 0.5);

/// Flat JSON object with the scalar report entries.
std::string report_json(const SolveReport& report);

}  // namespace spike
