#pragma once

#include <string>
#include <vector>

#include "spike/fem.hpp"

namespace spike {

/// Boundary-centred Moser function on the half disk of radius delta:
/// plateau sqrt(L / 2 pi) for r < delta sqrt(eps), logarithmic ramp
/// sqrt(2 / (pi L)) log(delta / r) up to r = delta, zero beyond; L = log(1/eps).
class MoserFunction {
 public:
  MoserFunction(double eps, double delta = 0.5);

  double eps() const { return eps_; }
  double delta() const { return delta_; }
  double log_inv_eps() const { return L_; }
  double plateau() const;

  /// Value at distance r from the centre.
  double value(double r) const;
  /// int |grad u|^2 over the half disk (exactly 1).
  double dirichlet() const;
  /// int u^2 over the half disk.
  double l2_squared() const;
  /// sqrt(dirichlet + l2_squared).
  double h1_norm() const;

 private:
  double eps_, delta_, L_;
};

/// Closed-form evaluation at a point x of the half disk centred at p.
double moser_eval(double eps, double delta, const Point& x, const Point& p = Point::Zero());

/// int v^2 (e^{alpha v^2} - 1) over the half disk for v = u / |u|_{W^{1,2}}.
double tm_functional(const MoserFunction& u, double alpha);
/// Same functional for a nodal field, with lumped quadrature and the
/// W^{1,2} norm from the P1 matrices.
double tm_functional(const Field& u, double alpha);

enum class Growth { Bounded, Diverging, Indeterminate };
std::string to_string(Growth g);

struct SharpnessRow {
  double alpha = 0;
  std::vector<double> values;  // one per eps
  double slope = 0;            // least-squares slope against log(1/eps)
  double r_squared = 0;
  double ratio = 0;  // last / first
  Growth growth = Growth::Indeterminate;
};

struct SharpnessTable {
  std::vector<double> eps;
  std::vector<SharpnessRow> rows;
};

/// Evaluates the functional on each (alpha, eps) pair. eps must decrease and
/// cover at least four decades (first / last >= 1e3).
SharpnessTable sharpness_sweep(const std::vector<double>& alphas, const std::vector<double>& eps_list,
                               double delta = 0.5);

}  // namespace spike
