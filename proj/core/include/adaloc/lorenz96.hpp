#pragma once

#include "adaloc/model.hpp"

namespace adaloc {

/// Shortest ring distance between indices i and j (0-based) on a cycle of
/// length n; neighbors are at distance 1.
double cyclic_distance(Index n, Index i, Index j);

struct Lorenz96Config {
  Index n = 40;
  double forcing = 8.0;
  double dt = 0.01;
};

/// Lorenz'96: dx_i/dt = (x_{i+1} - x_{i-2}) x_{i-1} - x_i + F, cyclic indexing.
class Lorenz96 : public ModelSystem {
 public:
  explicit Lorenz96(Lorenz96Config cfg);

  Index dim() const override { return cfg_.n; }
  std::string name() const override { return "lorenz96"; }
  void tendency(double t, const Vector& x, Vector& dxdt) const override;
  double distance(Index i, Index j) const override { return cyclic_distance(cfg_.n, i, j); }
  double default_timestep() const override { return cfg_.dt; }

  /// Uniform state at 8, component 20 (1-based) nudged to 8.008. The nudged
  /// component index is clamped to n for n < 20.
  static Vector perturbed_uniform_state(const Lorenz96Config& cfg);

  /// perturbed_uniform_state integrated one time unit onto the attractor
  /// (with this model's own tendency).
  Vector initial_condition(Rng& rng) const override;

  const Lorenz96Config& config() const { return cfg_; }

 protected:
  /// Per-component forcing; constant for the canonical model.
  virtual double forcing_at(double /*t*/, Index /*i*/) const { return cfg_.forcing; }

  Lorenz96Config cfg_;
};

struct MultivariateLorenz96Config {
  Index n = 40;
  double base = 8.0;
  double amplitude = 4.0;
  double omega = 6.283185307179586476925286766559;  // 2*pi
  Index q = 4;  // must divide n
  double dt = 0.01;
};

/// Time- and component-dependent forcing value
/// F_i(t) = base + amplitude * cos(omega * (t + ((i-1) mod q)/q)), i 1-based.
double multivariate_forcing(const MultivariateLorenz96Config& cfg, double t, Index i_zero_based);

/// Lorenz'96 with the oscillating per-component forcing above. Average
/// behavior matches the canonical model; instantaneous behavior does not.
class MultivariateLorenz96 : public Lorenz96 {
 public:
  explicit MultivariateLorenz96(MultivariateLorenz96Config cfg);

  std::string name() const override { return "mlorenz96"; }

  const MultivariateLorenz96Config& mconfig() const { return mcfg_; }

 protected:
  double forcing_at(double t, Index i) const override {
    return multivariate_forcing(mcfg_, t, i);
  }

 private:
  MultivariateLorenz96Config mcfg_;
};

}  // namespace adaloc
