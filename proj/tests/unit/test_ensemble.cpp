#include <Eigen/Eigenvalues>
#include <doctest.h>

#include "adaloc/ensemble.hpp"
#include "adaloc/rng.hpp"
#include "support/reference.hpp"

using namespace adaloc;

namespace {

Ensemble random_ensemble(Rng& rng, Index n, Index N) {
  Matrix members(n, N);
  for (Index e = 0; e < N; ++e) members.col(e) = rng.normal_vector(n);
  return Ensemble(std::move(members));
}

}  // namespace

TEST_CASE("mean of two members") {
  Matrix m(2, 2);
  m << 1, 3, 1, 3;
  const Ensemble ens(m);
  CHECK(ens.mean()[0] == doctest::Approx(2.0));
  CHECK(ens.mean()[1] == doctest::Approx(2.0));
}

TEST_CASE("mean of identical members is the member") {
  const Vector v = (Vector(3) << 0.5, -2.0, 7.0).finished();
  const Ensemble ens(v.replicate(1, 4));
  CHECK((ens.mean() - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mean matches an element-wise loop oracle") {
  Rng rng(11);
  const Ensemble ens = random_ensemble(rng, 3, 5);
  for (Index i = 0; i < 3; ++i) {
    double acc = 0.0;
    for (Index e = 0; e < 5; ++e) acc += ens.members()(i, e);
    CHECK(ens.mean()[i] == doctest::Approx(acc / 5.0).epsilon(1e-14));
  }
}

TEST_CASE("anomalies: simple case, identity case, zero row sums") {
  Matrix m(2, 2);
  m << 1, 3, 1, 3;
  const Ensemble ens(m);
  CHECK(ens.anomalies()(0, 0) == doctest::Approx(-1.0));
  CHECK(ens.anomalies()(0, 1) == doctest::Approx(1.0));

  const Vector v = Vector::Ones(3);
  CHECK(Ensemble(v.replicate(1, 5)).anomalies().cwiseAbs().maxCoeff() == 0.0);

  Rng rng(3);
  const Ensemble r = random_ensemble(rng, 4, 6);
  const double scale = r.members().cwiseAbs().maxCoeff();
  CHECK(r.anomalies().rowwise().sum().cwiseAbs().maxCoeff() < 1e-12 * scale);
}

TEST_CASE("members reconstruct as mean plus anomalies") {
  Rng rng(17);
  const Ensemble ens = random_ensemble(rng, 6, 5);
  const Matrix rebuilt = ens.anomalies().colwise() + ens.mean();
  CHECK((rebuilt - ens.members()).cwiseAbs().maxCoeff() <
        1e-12 * ens.members().cwiseAbs().maxCoeff());
}

TEST_CASE("covariance: scalar variance, zero case, PSD, symmetry") {
  Matrix m(1, 2);
  m << 0, 2;
  CHECK(Ensemble(m).covariance()(0, 0) == doctest::Approx(2.0));

  const Vector v = Vector::Constant(3, 4.0);
  CHECK(Ensemble(v.replicate(1, 3)).covariance().cwiseAbs().maxCoeff() == 0.0);

  Rng rng(23);
  const Ensemble ens = random_ensemble(rng, 5, 3);
  const Matrix P = ens.covariance();
  CHECK((P - P.transpose()).cwiseAbs().maxCoeff() < 1e-12 * P.cwiseAbs().maxCoeff());
  const Vector eigs = Eigen::SelfAdjointEigenSolver<Matrix>(P).eigenvalues();
  CHECK(eigs.minCoeff() >= -1e-10 * P.trace());
  CHECK((P - testref::loop_covariance(ens.members())).cwiseAbs().maxCoeff() <
        1e-12 * P.cwiseAbs().maxCoeff());
}

TEST_CASE("ensembles need at least two members") {
  CHECK_THROWS_AS(Ensemble(Matrix::Zero(3, 1)), std::invalid_argument);
}

TEST_CASE("inflation: identity at alpha 1, scalar case, covariance scaling") {
  Rng rng(29);
  const Ensemble ens = random_ensemble(rng, 4, 6);
  const Ensemble same = inflate(ens, 1.0);
  CHECK((same.members() - ens.members()).cwiseAbs().maxCoeff() == 0.0);

  Matrix m(1, 2);
  m << 0, 2;
  const Ensemble doubled = inflate(Ensemble(m), 2.0);
  CHECK(doubled.members()(0, 0) == doctest::Approx(-1.0));
  CHECK(doubled.members()(0, 1) == doctest::Approx(3.0));
  CHECK(doubled.mean()[0] == doctest::Approx(1.0));

  const Ensemble inflated = inflate(ens, 1.05);
  CHECK((inflated.mean() - ens.mean()).cwiseAbs().maxCoeff() == 0.0);
  const Matrix ratio = inflated.covariance().cwiseQuotient(ens.covariance());
  for (Index i = 0; i < ratio.rows(); ++i)
    for (Index j = 0; j < ratio.cols(); ++j)
      if (std::abs(ens.covariance()(i, j)) > 1e-8)
        CHECK(ratio(i, j) == doctest::Approx(1.1025).epsilon(1e-10));

  CHECK_THROWS_AS(inflate(ens, 0.99), std::invalid_argument);
}

TEST_CASE("observation operator validation") {
  CHECK_THROWS_AS(ObservationOperator({0, 5}, 5), std::invalid_argument);
  CHECK_THROWS_AS(ObservationOperator({1, 1}, 5), std::invalid_argument);
  CHECK_THROWS_AS(ObservationOperator({-1}, 5), std::invalid_argument);
  CHECK_THROWS_AS(Observation(Vector::Ones(2), Vector::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(Observation(Vector::Ones(2), Vector::Ones(3)), std::invalid_argument);
}

TEST_CASE("projection selects entries in index order") {
  const Vector x = (Vector(3) << 5, 7, 9).finished();
  const ObservationOperator H = ObservationOperator::from_one_based({2}, 3);
  CHECK(project_to_obs(x, H)[0] == 7.0);

  const ObservationOperator full({0, 1, 2}, 3);
  CHECK((project_to_obs(x, full) - x).cwiseAbs().maxCoeff() == 0.0);

  Matrix m(4, 4);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) m(i, j) = static_cast<double>(10 * i + j);
  const ObservationOperator sub = ObservationOperator::from_one_based({1, 3}, 4);
  const Matrix mm = project_rows_cols(m, sub);
  for (Index r = 0; r < 2; ++r)
    for (Index c = 0; c < 2; ++c) CHECK(mm(r, c) == m(sub.indices()[r], sub.indices()[c]));
}

TEST_CASE("projected covariance equals dense H P H^T") {
  Rng rng(31);
  const Ensemble ens = random_ensemble(rng, 12, 6);
  const ObservationOperator H({1, 4, 7, 10}, 12);
  const Matrix dense = testref::selection_matrix(H) * ens.covariance() *
                       testref::selection_matrix(H).transpose();
  const Matrix projected = project_rows_cols(ens.covariance(), H);
  CHECK((dense - projected).cwiseAbs().maxCoeff() < 1e-12 * dense.cwiseAbs().maxCoeff());
}
