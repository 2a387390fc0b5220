#include "adaloc/lorenz96.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "adaloc/integrator.hpp"

namespace adaloc {

double cyclic_distance(Index n, Index i, Index j) {
  if (i < 0 || i >= n || j < 0 || j >= n)
    throw std::invalid_argument("cyclic_distance: index out of range");
  const Index direct = std::abs(i - j);
  return static_cast<double>(std::min(direct, n - direct));
}

Lorenz96::Lorenz96(Lorenz96Config cfg) : cfg_(cfg) {
  if (cfg_.n < 4) throw std::invalid_argument("Lorenz96: n must be >= 4");
  if (!(cfg_.dt > 0)) throw std::invalid_argument("Lorenz96: dt must be positive");
}

void Lorenz96::tendency(double t, const Vector& x, Vector& dxdt) const {
  const Index n = cfg_.n;
  if (x.size() != n)
    throw std::invalid_argument("Lorenz96::tendency: state length " + std::to_string(x.size()) +
                                " != n = " + std::to_string(n));
  dxdt.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Index ip1 = (i + 1) % n;
    const Index im1 = (i - 1 + n) % n;
    const Index im2 = (i - 2 + n) % n;
    dxdt[i] = (x[ip1] - x[im2]) * x[im1] - x[i] + forcing_at(t, i);
  }
}

Vector Lorenz96::perturbed_uniform_state(const Lorenz96Config& cfg) {
  Vector x = Vector::Constant(cfg.n, 8.0);
  const Index perturbed = std::min<Index>(19, cfg.n - 1);  // component 20, 1-based
  x[perturbed] = 8.008;
  return x;
}

Vector Lorenz96::initial_condition(Rng& /*rng*/) const {
  return integrate(*this, perturbed_uniform_state(cfg_), 0.0, 1.0, cfg_.dt);
}

double multivariate_forcing(const MultivariateLorenz96Config& cfg, double t, Index i_zero_based) {
  if (i_zero_based < 0 || i_zero_based >= cfg.n)
    throw std::invalid_argument("multivariate_forcing: index out of range");
  const double phase = static_cast<double>(i_zero_based % cfg.q) / static_cast<double>(cfg.q);
  return cfg.base + cfg.amplitude * std::cos(cfg.omega * (t + phase));
}

MultivariateLorenz96::MultivariateLorenz96(MultivariateLorenz96Config cfg)
    : Lorenz96(Lorenz96Config{cfg.n, cfg.base, cfg.dt}), mcfg_(cfg) {
  if (mcfg_.q < 1 || mcfg_.n % mcfg_.q != 0)
    throw std::invalid_argument("MultivariateLorenz96: q must divide n");
}

}  // namespace adaloc
