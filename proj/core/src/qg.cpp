#include "adaloc/qg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "adaloc/integrator.hpp"

namespace adaloc {

namespace {

// Grid fields are padded with a zero ring so stencils never branch.
class Padded {
 public:
  Padded(const Vector& interior, Index grid)
      : grid_(grid), stride_(grid + 2), data_(Vector::Zero(stride_ * stride_)) {
    for (Index r = 0; r < grid_; ++r)
      data_.segment((r + 1) * stride_ + 1, grid_) = interior.segment(r * grid_, grid_);
  }

  // r, c are interior indices in [-1, grid]; the ring reads as zero.
  double operator()(Index r, Index c) const { return data_[(r + 1) * stride_ + (c + 1)]; }

 private:
  Index grid_;
  Index stride_;
  Vector data_;
};

}  // namespace

QuasiGeostrophic::QuasiGeostrophic(QGConfig cfg)
    : cfg_(cfg), h_(1.0 / static_cast<double>(cfg.grid + 1)) {
  if (cfg_.grid < 8) throw std::invalid_argument("QuasiGeostrophic: grid must be >= 8");
  if (!(cfg_.F > 0)) throw std::invalid_argument("QuasiGeostrophic: F must be positive");
  if (!(cfg_.dt > 0)) throw std::invalid_argument("QuasiGeostrophic: dt must be positive");

  // (F I - laplace) is symmetric positive definite under Dirichlet conditions.
  const Index G = cfg_.grid;
  const Index n = G * G;
  const double inv_h2 = 1.0 / (h_ * h_);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(5 * n));
  for (Index r = 0; r < G; ++r) {
    for (Index c = 0; c < G; ++c) {
      const Index k = r * G + c;
      triplets.emplace_back(k, k, 4.0 * inv_h2 + cfg_.F);
      if (r > 0) triplets.emplace_back(k, k - G, -inv_h2);
      if (r + 1 < G) triplets.emplace_back(k, k + G, -inv_h2);
      if (c > 0) triplets.emplace_back(k, k - 1, -inv_h2);
      if (c + 1 < G) triplets.emplace_back(k, k + 1, -inv_h2);
    }
  }
  Eigen::SparseMatrix<double> M(n, n);
  M.setFromTriplets(triplets.begin(), triplets.end());
  helmholtz_.compute(M);
  if (helmholtz_.info() != Eigen::Success)
    throw std::runtime_error("QuasiGeostrophic: Helmholtz factorization failed");
}

Vector QuasiGeostrophic::laplacian(const Vector& field, Index grid, double h) {
  if (field.size() != grid * grid)
    throw std::invalid_argument("laplacian: field size does not match grid");
  const Padded f(field, grid);
  const double inv_h2 = 1.0 / (h * h);
  Vector out(grid * grid);
  for (Index r = 0; r < grid; ++r)
    for (Index c = 0; c < grid; ++c)
      out[r * grid + c] =
          (f(r - 1, c) + f(r + 1, c) + f(r, c - 1) + f(r, c + 1) - 4.0 * f(r, c)) * inv_h2;
  return out;
}

Vector QuasiGeostrophic::arakawa_jacobian(const Vector& psi, const Vector& q, Index grid,
                                          double h) {
  if (psi.size() != grid * grid || q.size() != grid * grid)
    throw std::invalid_argument("arakawa_jacobian: field size does not match grid");
  const Padded p(psi, grid);
  const Padded z(q, grid);
  const double w = 1.0 / (12.0 * h * h);  // (1/3) average of three 1/(4h^2) forms
  Vector out(grid * grid);
  for (Index r = 0; r < grid; ++r) {
    for (Index c = 0; c < grid; ++c) {
      // x is the column direction, y the row direction.
      const double j_pp = (p(r, c + 1) - p(r, c - 1)) * (z(r + 1, c) - z(r - 1, c)) -
                          (p(r + 1, c) - p(r - 1, c)) * (z(r, c + 1) - z(r, c - 1));
      const double j_px = p(r, c + 1) * (z(r + 1, c + 1) - z(r - 1, c + 1)) -
                          p(r, c - 1) * (z(r + 1, c - 1) - z(r - 1, c - 1)) -
                          p(r + 1, c) * (z(r + 1, c + 1) - z(r + 1, c - 1)) +
                          p(r - 1, c) * (z(r - 1, c + 1) - z(r - 1, c - 1));
      const double j_xp = p(r + 1, c + 1) * (z(r + 1, c) - z(r, c + 1)) -
                          p(r - 1, c - 1) * (z(r, c - 1) - z(r - 1, c)) -
                          p(r + 1, c - 1) * (z(r + 1, c) - z(r, c - 1)) +
                          p(r - 1, c + 1) * (z(r, c + 1) - z(r - 1, c));
      out[r * grid + c] = (j_pp + j_px + j_xp) * w;
    }
  }
  return out;
}

Vector QuasiGeostrophic::solve_psi(const Vector& q) const {
  // laplace(psi) - F psi = q  <=>  (F I - laplace) psi = -q
  return helmholtz_.solve(-q);
}

Vector QuasiGeostrophic::helmholtz_solve(const Vector& q) const {
  if (q.size() != dim())
    throw std::invalid_argument("helmholtz_solve: state size does not match grid");
  Vector psi = solve_psi(q);
  const Vector residual = laplacian(psi, cfg_.grid, h_) - cfg_.F * psi - q;
  const double scale = q.cwiseAbs().maxCoeff();
  if (residual.cwiseAbs().maxCoeff() > 1e-8 * std::max(scale, 1e-300))
    throw std::runtime_error("helmholtz_solve: residual above 1e-8 relative");
  return psi;
}

void QuasiGeostrophic::tendency(double /*t*/, const Vector& q, Vector& dqdt) const {
  const Index G = cfg_.grid;
  if (q.size() != G * G)
    throw std::invalid_argument("QuasiGeostrophic::tendency: state size does not match grid");

  const Vector psi = solve_psi(q);
  const Vector jac = arakawa_jacobian(psi, q, G, h_);
  // laplace^3 via repeated application; each pass re-imposes the zero ring.
  const Vector lap3 = laplacian(laplacian(laplacian(psi, G, h_), G, h_), G, h_);

  const Padded p(psi, G);
  const double inv_2h = 1.0 / (2.0 * h_);
  const double two_pi = 2.0 * std::numbers::pi;

  dqdt.resize(G * G);
  for (Index r = 0; r < G; ++r) {
    const double y = static_cast<double>(r + 1) * h_;
    const double forcing = two_pi * std::sin(two_pi * y);
    for (Index c = 0; c < G; ++c) {
      const Index k = r * G + c;
      const double psi_x = (p(r, c + 1) - p(r, c - 1)) * inv_2h;
      dqdt[k] = -psi_x - cfg_.eps * jac[k] - cfg_.A * lap3[k] + forcing;
    }
  }
}

double QuasiGeostrophic::distance(Index i, Index j) const {
  const Index G = cfg_.grid;
  if (i < 0 || i >= G * G || j < 0 || j >= G * G)
    throw std::invalid_argument("QuasiGeostrophic::distance: index out of range");
  const double dr = static_cast<double>(i / G - j / G);
  const double dc = static_cast<double>(i % G - j % G);
  return std::hypot(dr, dc);
}

Vector QuasiGeostrophic::initial_condition(Rng& rng) const {
  Vector q = 0.01 * rng.normal_vector(dim());
  if (cfg_.truth_spinup > 0)
    q = integrate(*this, std::move(q), -cfg_.truth_spinup, 0.0, cfg_.dt);
  return q;
}

}  // namespace adaloc
