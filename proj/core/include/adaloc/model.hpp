#pragma once

#include <string>

#include "adaloc/rng.hpp"
#include "adaloc/types.hpp"

namespace adaloc {

/// Abstract dynamical system: tendency dx/dt = f(t, x) plus the spatial
/// metric between state components used by localization.
///
/// Models are read-only after construction (including any factorizations),
/// so one instance can serve concurrent experiment runs.
class ModelSystem {
 public:
  virtual ~ModelSystem() = default;

  virtual Index dim() const = 0;
  virtual std::string name() const = 0;

  /// dxdt is resized/overwritten. x.size() must equal dim().
  virtual void tendency(double t, const Vector& x, Vector& dxdt) const = 0;

  /// Physical distance between state components i and j (0-based).
  /// Symmetric, zero on the diagonal.
  virtual double distance(Index i, Index j) const = 0;

  /// Internal integrator step used between observation windows.
  virtual double default_timestep() const = 0;

  /// Deterministic-from-seed state on the model attractor; twin experiments
  /// start the truth here. Models with a deterministic recipe ignore rng.
  virtual Vector initial_condition(Rng& rng) const = 0;
};

}  // namespace adaloc
