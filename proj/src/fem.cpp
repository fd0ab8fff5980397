#include "spike/fem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "spike/errors.hpp"
#include "spike/radial_profile.hpp"

namespace spike {

Field::Field(std::shared_ptr<const Mesh> m, Eigen::VectorXd v) : mesh(std::move(m)), values(std::move(v)) {
  if (!mesh) throw Error(ErrorKind::InvalidParameter, "field has no mesh");
  if (static_cast<std::size_t>(values.size()) != mesh->num_nodes())
    throw Error(ErrorKind::InvalidParameter, "field length " + std::to_string(values.size()) +
                                                 " differs from node count " + std::to_string(mesh->num_nodes()));
  if (!values.allFinite()) throw Error(ErrorKind::InvalidParameter, "field values must be finite");
}

AssembledOperators assemble(const Mesh& mesh) {
  const int n = static_cast<int>(mesh.num_nodes());
  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(9 * mesh.num_triangles());
  mt.reserve(9 * mesh.num_triangles());
  AssembledOperators ops;
  ops.lumped_mass = Eigen::VectorXd::Zero(n);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles()[t];
    const Point &a = mesh.node(tri[0]), &b = mesh.node(tri[1]), &c = mesh.node(tri[2]);
    const double area = mesh.triangle_area(static_cast<int>(t));
    double scale = std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
    if (!(area > 1e-14 * scale))
      throw Error(ErrorKind::Assembly, "degenerate triangle " + std::to_string(t));
    // Gradients of the barycentric basis: rotated opposite edges over 2 area.
    std::array<Point, 3> g{Point(b.y() - c.y(), c.x() - b.x()), Point(c.y() - a.y(), a.x() - c.x()),
                           Point(a.y() - b.y(), b.x() - a.x())};
    for (auto& gi : g) gi /= 2 * area;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        kt.emplace_back(tri[i], tri[j], area * g[i].dot(g[j]));
        mt.emplace_back(tri[i], tri[j], area / 12.0 * (i == j ? 2.0 : 1.0));
      }
      ops.lumped_mass[tri[i]] += area / 3.0;
    }
  }
  ops.stiffness.resize(n, n);
  ops.mass.resize(n, n);
  ops.stiffness.setFromTriplets(kt.begin(), kt.end());
  ops.mass.setFromTriplets(mt.begin(), mt.end());
  return ops;
}

EnergyFunctional::EnergyFunctional(std::shared_ptr<const Mesh> mesh, double d)
    : EnergyFunctional(mesh, std::make_shared<AssembledOperators>(assemble(*mesh)), d) {}

EnergyFunctional::EnergyFunctional(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const AssembledOperators> ops,
                                   double d)
    : mesh_(std::move(mesh)), ops_(std::move(ops)), d_(d) {
  if (!(d_ > 0)) throw Error(ErrorKind::InvalidParameter, "diffusion d must be positive");
  A_ = d_ * ops_->stiffness + ops_->mass;
  solver_ = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(A_);
  if (solver_->info() != Eigen::Success) throw Error(ErrorKind::Solver, "factorization of d K + M failed");
}

void EnergyFunctional::check_finite(const Eigen::VectorXd& u) const {
  if (u.size() != static_cast<Eigen::Index>(mesh_->num_nodes()))
    throw Error(ErrorKind::InvalidParameter, "vector length differs from node count");
  double m = u.cwiseAbs().maxCoeff();
  if (!(m <= kOverflowThreshold))
    throw Error(ErrorKind::Overflow, "|u| = " + std::to_string(m) + " exceeds the e^{u^2} overflow threshold 26");
}

double EnergyFunctional::inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return a.dot(A_ * b); }

double EnergyFunctional::dirichlet(const Eigen::VectorXd& u) const { return d_ * u.dot(ops_->stiffness * u); }

double EnergyFunctional::nonlinear_F(const Eigen::VectorXd& u) const {
  check_finite(u);
  double s = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) s += ops_->lumped_mass[i] * Nonlinearity::F(u[i]);
  return s;
}

double EnergyFunctional::nonlinear_uf(const Eigen::VectorXd& u) const {
  check_finite(u);
  double s = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) s += ops_->lumped_mass[i] * u[i] * Nonlinearity::f(u[i]);
  return s;
}

double EnergyFunctional::energy(const Eigen::VectorXd& u) const { return 0.5 * quadratic(u) - nonlinear_F(u); }

double EnergyFunctional::nehari(const Eigen::VectorXd& u) const { return quadratic(u) - nonlinear_uf(u); }

Eigen::VectorXd EnergyFunctional::residual(const Eigen::VectorXd& u) const {
  check_finite(u);
  Eigen::VectorXd r = A_ * u;
  for (Eigen::Index i = 0; i < u.size(); ++i) r[i] -= ops_->lumped_mass[i] * Nonlinearity::f(u[i]);
  return r;
}

Eigen::VectorXd EnergyFunctional::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = solver_->solve(rhs);
  if (solver_->info() != Eigen::Success || !x.allFinite()) throw Error(ErrorKind::Solver, "linear solve failed");
  return x;
}

Eigen::VectorXd EnergyFunctional::gradient(const Eigen::VectorXd& u) const { return solve(residual(u)); }

double energy_J(const Field& field, double d) { return EnergyFunctional(field.mesh, d).energy(field.values); }

double nehari_G(const Field& field, double d) { return EnergyFunctional(field.mesh, d).nehari(field.values); }

Field gradient_J(const Field& field, double d) {
  return Field(field.mesh, EnergyFunctional(field.mesh, d).gradient(field.values));
}

double gradient_fd_check(const EnergyFunctional& E, int fields, std::uint64_t seed, double step) {
  if (fields < 1 || !(step > 0)) throw Error(ErrorKind::InvalidParameter, "need at least one field and a positive step");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(0.0, 1.5), direction(-1.0, 1.0);
  const Eigen::Index n = static_cast<Eigen::Index>(E.mesh().num_nodes());
  double worst = 0;
  for (int k = 0; k < fields; ++k) {
    Eigen::VectorXd x(n), dir(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = value(rng);
      dir[i] = direction(rng);
    }
    double fd = (E.energy(x + step * dir) - E.energy(x - step * dir)) / (2 * step);
    double an = E.inner(E.gradient(x), dir);
    worst = std::max(worst, std::abs(fd - an) / std::abs(an));
  }
  return worst;
}

}  // namespace spike
