#include "adaloc/checks.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>

#include "adaloc/adaptive.hpp"
#include "adaloc/integrator.hpp"
#include "adaloc/lorenz96.hpp"
#include "adaloc/qg.hpp"
#include "adaloc/rng.hpp"

namespace adaloc {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

// Randomized observation-space cost instance on a small ring model.
struct SmallInstance {
  std::unique_ptr<Lorenz96> model;
  std::optional<Ensemble> forecast;
  std::optional<Observation> obs;
  std::optional<ObservationOperator> H;
  std::optional<LocalizationSpec> spec;
  std::optional<GammaPrior> prior;
  Vector upsilon;
};

SmallInstance random_instance(Rng& rng, MeanKind kind, Index n, Index m, Index N, Index g) {
  SmallInstance inst;
  inst.model = std::make_unique<Lorenz96>(Lorenz96Config{n, 8.0, 0.01});

  Matrix members(n, N);
  for (Index e = 0; e < N; ++e) members.col(e) = 2.0 * rng.normal_vector(n);
  inst.forecast.emplace(std::move(members));

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  for (Index i = 0; i < m; ++i) {
    const auto pick = i + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(pick)]);
  }
  std::vector<Index> observed(order.begin(), order.begin() + m);
  std::sort(observed.begin(), observed.end());
  inst.H.emplace(observed, n);

  Vector rvar(m);
  for (Index i = 0; i < m; ++i) rvar[i] = 0.3 + rng.uniform();
  inst.obs.emplace(project_to_obs(inst.forecast->mean(), *inst.H) + rng.normal_vector(m),
                   rvar);

  std::vector<int> assignment(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i)
    assignment[static_cast<size_t>(i)] = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(g)));
  for (Index j = 0; j < g; ++j) assignment[static_cast<size_t>(j)] = static_cast<int>(j);
  inst.spec.emplace(LocalizationSpec{kind, GroupMapping(assignment, static_cast<int>(g))});

  Vector mean(g), var(g);
  for (Index j = 0; j < g; ++j) {
    mean[j] = 1.0 + 4.0 * rng.uniform();
    var[j] = 0.25 + 0.5 * rng.uniform() * mean[j] * mean[j];
  }
  inst.prior.emplace(mean, var);

  inst.upsilon.resize(g);
  for (Index j = 0; j < g; ++j) inst.upsilon[j] = 0.5 + 4.0 * rng.uniform();
  return inst;
}

CheckResult check_gradient_fd(Rng& rng) {
  const MeanKind kinds[] = {MeanKind::Mean, MeanKind::Sqrt, MeanKind::Rms, MeanKind::Harm};
  double worst = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const Index n = 6 + static_cast<Index>(rng.uniform_index(7));
    const Index m = 3 + static_cast<Index>(rng.uniform_index(std::min<std::uint64_t>(6, static_cast<std::uint64_t>(n - 2))));
    const Index N = 3 + static_cast<Index>(rng.uniform_index(4));
    const Index g = 1 + static_cast<Index>(rng.uniform_index(3));
    SmallInstance inst = random_instance(rng, kinds[trial % 4], n, m, N, g);
    ObsSpaceCost cost(*inst.forecast, *inst.obs, *inst.H, *inst.model, *inst.spec, *inst.prior);

    const Vector grad = cost.evaluate(inst.upsilon, true).gradient;
    for (Index j = 0; j < g; ++j) {
      const double h = 1e-6 * std::max(1.0, inst.upsilon[j]);
      Vector up = inst.upsilon, dn = inst.upsilon;
      up[j] += h;
      dn[j] -= h;
      const double fd =
          (cost.evaluate(up, false).value - cost.evaluate(dn, false).value) / (2.0 * h);
      const double rel = std::abs(grad[j] - fd) / std::max(1e-12, std::abs(fd));
      worst = std::max(worst, rel);
    }
  }
  return {"gradient-vs-finite-difference", worst < 1e-5,
          "max relative error " + fmt(worst) + " (tol 1e-5)"};
}

CheckResult check_psd_preservation(Rng& rng) {
  const MeanKind kinds[] = {MeanKind::Mean, MeanKind::Sqrt, MeanKind::Rms, MeanKind::Harm};
  double worst = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    const Index n = 4 + static_cast<Index>(rng.uniform_index(7));
    Matrix A(n, n);
    for (Index c = 0; c < n; ++c) A.col(c) = rng.normal_vector(n);
    const Matrix P = A * A.transpose() / static_cast<double>(n);

    Lorenz96 ring(Lorenz96Config{std::max<Index>(n, 4), 8.0, 0.01});
    Vector radii(n);
    for (Index i = 0; i < n; ++i) radii[i] = 0.5 + 5.0 * rng.uniform();
    const Matrix rho = build_rho(ring, radii, kinds[trial % 4]);

    const Vector eigs = Eigen::SelfAdjointEigenSolver<Matrix>(rho.cwiseProduct(P))
                            .eigenvalues();
    worst = std::max(worst, -eigs.minCoeff() / P.trace());
  }
  return {"schur-product-psd", worst < 1e-10,
          "worst -lambda_min/trace " + fmt(worst) + " (tol 1e-10)"};
}

CheckResult check_arakawa_conservation(Rng& rng) {
  const Index G = 17;
  const double h = 1.0 / static_cast<double>(G + 1);
  // Fields satisfying the homogeneous Dirichlet condition: zero on the
  // outermost grid ring. The conservation sums are a property of the scheme
  // on boundary-compliant fields.
  Vector psi = rng.normal_vector(G * G);
  Vector q = rng.normal_vector(G * G);
  for (Index r = 0; r < G; ++r)
    for (Index c = 0; c < G; ++c)
      if (r == 0 || c == 0 || r == G - 1 || c == G - 1) {
        psi[r * G + c] = 0.0;
        q[r * G + c] = 0.0;
      }
  const Vector jac = QuasiGeostrophic::arakawa_jacobian(psi, q, G, h);
  const double scale = jac.cwiseAbs().sum() + 1e-300;
  const double s1 = std::abs(jac.sum()) / scale;
  const double s2 = std::abs(psi.dot(jac)) / (scale * psi.cwiseAbs().maxCoeff());
  const double s3 = std::abs(q.dot(jac)) / (scale * q.cwiseAbs().maxCoeff());
  const double worst = std::max({s1, s2, s3});
  return {"arakawa-conservation", worst < 1e-10,
          "worst normalized sum " + fmt(worst) + " (tol 1e-10)"};
}

CheckResult check_helmholtz(Rng& rng) {
  QGConfig cfg;
  cfg.grid = 17;
  cfg.truth_spinup = 0.0;
  const QuasiGeostrophic model(cfg);
  const Index G = cfg.grid;
  const double h = model.grid_spacing();

  const Vector psi_star = rng.normal_vector(G * G);
  const Vector q_star = QuasiGeostrophic::laplacian(psi_star, G, h) - cfg.F * psi_star;
  const Vector psi = model.helmholtz_solve(q_star);
  const double rel = (psi - psi_star).cwiseAbs().maxCoeff() / psi_star.cwiseAbs().maxCoeff();
  return {"helmholtz-manufactured-solution", rel < 1e-8,
          "max relative recovery error " + fmt(rel) + " (tol 1e-8)"};
}

// dx/dt = x, solution exp(t).
class ExponentialModel : public ModelSystem {
 public:
  Index dim() const override { return 1; }
  std::string name() const override { return "exp"; }
  void tendency(double, const Vector& x, Vector& dxdt) const override { dxdt = x; }
  double distance(Index, Index) const override { return 0.0; }
  double default_timestep() const override { return 0.1; }
  Vector initial_condition(Rng&) const override { return Vector::Ones(1); }
};

CheckResult check_rk4_order(Rng&) {
  const ExponentialModel model;
  const double exact = std::exp(1.0);
  double prev_err = 0.0;
  double min_order = 1e9;
  const double steps[] = {0.1, 0.05, 0.025};
  for (int i = 0; i < 3; ++i) {
    const Vector x = integrate(model, Vector::Ones(1), 0.0, 1.0, steps[i]);
    const double err = std::abs(x[0] - exact);
    if (i > 0) min_order = std::min(min_order, std::log2(prev_err / err));
    prev_err = err;
  }
  return {"rk4-order", min_order >= 3.9, "observed order " + fmt(min_order) + " (need >= 3.9)"};
}

CheckResult check_mean_axioms(Rng& rng) {
  const MeanKind kinds[] = {MeanKind::Min, MeanKind::Max, MeanKind::Mean,
                            MeanKind::Sqrt, MeanKind::Rms, MeanKind::Harm};
  for (int trial = 0; trial < 300; ++trial) {
    const double a = rng.uniform();
    const double b = rng.uniform();
    for (MeanKind kind : kinds) {
      const double mab = combine(kind, a, b);
      if (combine(kind, b, a) != mab)
        return {"mean-function-axioms", false, "commutativity violated for " + to_string(kind)};
      if (combine(kind, a, a) != a)
        return {"mean-function-axioms", false, "idempotence violated for " + to_string(kind)};
      if (mab < std::min(a, b) - 1e-15 || mab > std::max(a, b) + 1e-15)
        return {"mean-function-axioms", false, "betweenness violated for " + to_string(kind)};
    }
  }
  return {"mean-function-axioms", true, "commutative, idempotent, between on 300 sampled pairs"};
}

}  // namespace

std::vector<CheckResult> run_fast_checks(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CheckResult> results;
  Rng r1 = rng.substream("gradient");
  results.push_back(check_gradient_fd(r1));
  Rng r2 = rng.substream("psd");
  results.push_back(check_psd_preservation(r2));
  Rng r3 = rng.substream("arakawa");
  results.push_back(check_arakawa_conservation(r3));
  Rng r4 = rng.substream("helmholtz");
  results.push_back(check_helmholtz(r4));
  Rng r5 = rng.substream("rk4");
  results.push_back(check_rk4_order(r5));
  Rng r6 = rng.substream("mean");
  results.push_back(check_mean_axioms(r6));
  return results;
}

}  // namespace adaloc
