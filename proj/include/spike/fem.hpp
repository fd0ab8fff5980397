#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "spike/mesh.hpp"

namespace spike {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Piecewise-linear function: one value per mesh node.
struct Field {
  Field(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd values);

  std::shared_ptr<const Mesh> mesh;
  Eigen::VectorXd values;

  double max() const { return values.maxCoeff(); }
  double min() const { return values.minCoeff(); }
};

struct AssembledOperators {
  SparseMatrix stiffness;  // int grad phi_i . grad phi_j
  SparseMatrix mass;       // int phi_i phi_j
  Eigen::VectorXd lumped_mass;
};

/// Exact P1 element integration, accumulated in triangle-index order.
AssembledOperators assemble(const Mesh& mesh);

/// Discrete J_d, G_d and their derivatives for a fixed mesh and d. The
/// quadratic part uses the consistent matrices and the nonlinear part uses
/// lumped-mass nodal quadrature. Factorizes d K + M once.
class EnergyFunctional {
 public:
  EnergyFunctional(std::shared_ptr<const Mesh> mesh, double d);
  EnergyFunctional(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const AssembledOperators> ops, double d);

  double d() const { return d_; }
  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const AssembledOperators& operators() const { return *ops_; }
  const SparseMatrix& system() const { return A_; }

  /// a^T (d K + M) b.
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  /// u^T (d K + M) u = int d |grad u|^2 + u^2.
  double quadratic(const Eigen::VectorXd& u) const { return inner(u, u); }
  /// d int |grad u|^2 alone.
  double dirichlet(const Eigen::VectorXd& u) const;
  /// sum_i m_i F(u_i).
  double nonlinear_F(const Eigen::VectorXd& u) const;
  /// sum_i m_i u_i f(u_i) = sum_i m_i u_i^2 (e^{u_i^2} - 1).
  double nonlinear_uf(const Eigen::VectorXd& u) const;

  double energy(const Eigen::VectorXd& u) const;
  double nehari(const Eigen::VectorXd& u) const;
  /// r = (d K + M) u - m .* f(u).
  Eigen::VectorXd residual(const Eigen::VectorXd& u) const;
  /// Riesz representative of the residual in the d-weighted H^1 product.
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  void check_finite(const Eigen::VectorXd& u) const;

  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const AssembledOperators> ops_;
  double d_;
  SparseMatrix A_;
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> solver_;
};

/// Largest |u| accepted before e^{u^2} is considered an overflow.
constexpr double kOverflowThreshold = 26.0;

/// Largest relative gap between the central difference of J along a random
/// direction and <grad J, direction>, over `fields` random fields with nodal
/// values in [0, 1.5) and directions in [-1, 1). Deterministic in seed.
double gradient_fd_check(const EnergyFunctional& E, int fields, std::uint64_t seed, double step = 1e-5);

double energy_J(const Field& field, double d);
double nehari_G(const Field& field, double d);
Field gradient_J(const Field& field, double d);

}  // namespace spike
