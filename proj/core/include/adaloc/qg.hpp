#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "adaloc/model.hpp"

namespace adaloc {

struct QGConfig {
  Index grid = 33;       // interior points per side; paper-scale is 127
  double F = 1600.0;     // Froude-type constant in the Helmholtz coupling
  double eps = 1e-5;     // Jacobian (advection) strength
  double A = 2e-11;      // del^6 hyperviscosity coefficient
  double dt = 1.0;       // RK4 step, time units
  double truth_spinup = 100.0;  // free integration before the twin start
};

/// 1.5-layer quasi-geostrophic model on the unit square with homogeneous
/// Dirichlet boundaries. The state is the potential vorticity q on the
/// interior grid (row-major, row = y index); the stream function psi is
/// recovered each evaluation through the prefactored Helmholtz solve
///
///   laplace(psi) - F psi = q,
///
/// and the tendency is
///
///   q_t = -psi_x - eps J(psi, q) - A laplace^3(psi) + 2 pi sin(2 pi y).
///
/// All spatial operators are second-order central differences; J is the
/// nine-point Arakawa Jacobian.
class QuasiGeostrophic : public ModelSystem {
 public:
  explicit QuasiGeostrophic(QGConfig cfg);

  Index dim() const override { return cfg_.grid * cfg_.grid; }
  std::string name() const override { return "qg"; }
  void tendency(double t, const Vector& q, Vector& dqdt) const override;

  /// Euclidean distance in grid-coordinate units between state components.
  double distance(Index i, Index j) const override;

  double default_timestep() const override { return cfg_.dt; }

  /// Small seeded vorticity noise integrated for cfg.truth_spinup time units.
  Vector initial_condition(Rng& rng) const override;

  const QGConfig& config() const { return cfg_; }
  double grid_spacing() const { return h_; }

  /// Solve laplace(psi) - F psi = q and verify the residual against
  /// 1e-8 * max|q|; throws if the factorization failed to deliver it.
  Vector helmholtz_solve(const Vector& q) const;

  /// Five-point Laplacian with zero Dirichlet extension, interior G x G
  /// fields flattened row-major.
  static Vector laplacian(const Vector& field, Index grid, double h);

  /// Nine-point Arakawa Jacobian J(psi, q) = psi_x q_y - psi_y q_x with zero
  /// Dirichlet extension. Conserves the discrete integrals of J, psi*J and
  /// q*J over the interior.
  static Vector arakawa_jacobian(const Vector& psi, const Vector& q, Index grid, double h);

 private:
  Vector solve_psi(const Vector& q) const;  // no residual check

  QGConfig cfg_;
  double h_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> helmholtz_;
};

}  // namespace adaloc
