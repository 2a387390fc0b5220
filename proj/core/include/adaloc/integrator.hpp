#pragma once

#include <stdexcept>

#include "adaloc/ensemble.hpp"
#include "adaloc/model.hpp"

namespace adaloc {

/// Thrown when integration produces non-finite values.
class BlowUpError : public std::runtime_error {
 public:
  explicit BlowUpError(const std::string& what) : std::runtime_error(what) {}
};

/// One classical fourth-order Runge-Kutta step.
Vector rk4_step(const ModelSystem& model, double t, const Vector& x, double dt);

/// Integrate from t0 to t1 with steps of size ~dt. The step count is
/// round((t1-t0)/dt); dt is adjusted to divide the span evenly when the
/// rounding residual exceeds 1e-9 relative.
Vector integrate(const ModelSystem& model, Vector x, double t0, double t1, double dt);

/// Advance every member independently from t0 to t1. Member order is
/// preserved; a blow-up error names the offending member.
Ensemble propagate(const ModelSystem& model, const Ensemble& ens, double t0, double t1,
                   double dt);

}  // namespace adaloc
