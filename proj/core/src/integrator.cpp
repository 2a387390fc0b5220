#include "adaloc/integrator.hpp"

#include <cmath>
#include <string>

namespace adaloc {

Vector rk4_step(const ModelSystem& model, double t, const Vector& x, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("rk4_step: dt must be positive");
  Vector k1, k2, k3, k4;
  model.tendency(t, x, k1);
  model.tendency(t + 0.5 * dt, x + (0.5 * dt) * k1, k2);
  model.tendency(t + 0.5 * dt, x + (0.5 * dt) * k2, k3);
  model.tendency(t + dt, x + dt * k3, k4);
  Vector next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite())
    throw BlowUpError("rk4_step: non-finite state after step at t = " + std::to_string(t));
  return next;
}

namespace {

long resolve_steps(double t0, double t1, double& dt) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate: need t1 > t0");
  const double span = t1 - t0;
  long steps = std::lround(span / dt);
  if (steps < 1) steps = 1;
  if (std::abs(static_cast<double>(steps) * dt - span) > 1e-9 * span)
    dt = span / static_cast<double>(steps);
  return steps;
}

}  // namespace

Vector integrate(const ModelSystem& model, Vector x, double t0, double t1, double dt) {
  const long steps = resolve_steps(t0, t1, dt);
  double t = t0;
  for (long s = 0; s < steps; ++s) {
    x = rk4_step(model, t, x, dt);
    t = t0 + static_cast<double>(s + 1) * dt;
  }
  return x;
}

Ensemble propagate(const ModelSystem& model, const Ensemble& ens, double t0, double t1,
                   double dt) {
  Matrix advanced(ens.dim(), ens.size());
  for (Index e = 0; e < ens.size(); ++e) {
    try {
      advanced.col(e) = integrate(model, ens.members().col(e), t0, t1, dt);
    } catch (const BlowUpError& err) {
      throw BlowUpError("propagate: member " + std::to_string(e) + " blew up: " + err.what());
    }
  }
  return Ensemble(std::move(advanced));
}

}  // namespace adaloc
