#include <doctest.h>

#include <random>

#include "pintw/errors.hpp"
#include "pintw/pca.hpp"

using namespace pintw;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                              std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = normal(rng);
  return M;
}

}  // namespace

TEST_CASE("collinear 2-D points: one component along the line") {
  Eigen::MatrixXd X(5, 2);
  // Points on y = 2x.
  X << 0, 0, 1, 2, 2, 4, 3, 6, -1, -2;
  PCABasis basis = fit_pca(X, 1);
  REQUIRE(basis.num_components() == 1);
  Eigen::Vector2d direction(1.0, 2.0);
  direction.normalize();
  const double alignment = std::abs(basis.components.row(0).dot(direction));
  CHECK(alignment == doctest::Approx(1.0).epsilon(1e-10));
  // The single component carries all the variance.
  PCABasis full = fit_pca(X, 2);
  CHECK(full.explained_variance[1] <= 1e-10 * full.explained_variance[0]);
}

TEST_CASE("isotropic cloud: near-equal variances, orthonormal components") {
  std::mt19937_64 rng(1);
  Eigen::MatrixXd X = random_matrix(2000, 2, rng);
  PCABasis basis = fit_pca(X, 2);
  CHECK(basis.explained_variance[0] >= basis.explained_variance[1]);
  CHECK(basis.explained_variance[0] / basis.explained_variance[1] < 1.3);
  Eigen::MatrixXd gram = basis.components * basis.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("k = d on full-rank data recovers the total variance") {
  std::mt19937_64 rng(2);
  Eigen::MatrixXd X = random_matrix(50, 4, rng);
  PCABasis basis = fit_pca(X, 4);
  Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
  const double total = centered.array().square().sum() / (X.rows() - 1.0);
  CHECK(basis.explained_variance.sum() == doctest::Approx(total).epsilon(1e-8));
}

TEST_CASE("variance-fraction rule picks the smallest sufficient k") {
  std::mt19937_64 rng(3);
  // Strongly anisotropic data: the first axis dominates.
  Eigen::MatrixXd X = random_matrix(200, 3, rng);
  X.col(0) *= 20.0;
  PCABasis nearly_all = fit_pca(X, 0.95);
  CHECK(nearly_all.num_components() == 1);
  PCABasis everything = fit_pca(X, 0.9999999);
  CHECK(everything.num_components() == 3);
}

TEST_CASE("component sign convention: largest-magnitude entry positive") {
  std::mt19937_64 rng(4);
  Eigen::MatrixXd X = random_matrix(60, 3, rng);
  X.col(1) *= 5.0;
  PCABasis basis = fit_pca(X, 3);
  for (Eigen::Index i = 0; i < basis.num_components(); ++i) {
    Eigen::Index argmax;
    basis.components.row(i).cwiseAbs().maxCoeff(&argmax);
    CHECK(basis.components(i, argmax) > 0.0);
  }
}

TEST_CASE("projection variance matches explained variance") {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd X = random_matrix(120, 4, rng);
  X.col(2) *= 3.0;
  PCABasis basis = fit_pca(X, 4);
  Eigen::MatrixXd proj = extract_privileged(X, basis);
  for (Eigen::Index j = 0; j < 4; ++j) {
    Eigen::VectorXd col = proj.col(j);
    const double var =
        (col.array() - col.mean()).square().sum() / (X.rows() - 1.0);
    CHECK(var == doctest::Approx(basis.explained_variance[j]).epsilon(1e-8));
  }
}

TEST_CASE("extracting the mean rows gives the zero matrix") {
  std::mt19937_64 rng(6);
  Eigen::MatrixXd X = random_matrix(30, 3, rng);
  PCABasis basis = fit_pca(X, 2);
  Eigen::MatrixXd means = basis.mean.transpose().replicate(4, 1);
  CHECK(extract_privileged(means, basis).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("project + reconstruct with k = d reproduces the data") {
  std::mt19937_64 rng(7);
  Eigen::MatrixXd X = random_matrix(40, 3, rng);
  PCABasis basis = fit_pca(X, 3);
  Eigen::MatrixXd proj = extract_privileged(X, basis);
  Eigen::MatrixXd rebuilt =
      (proj * basis.components).rowwise() + basis.mean.transpose();
  CHECK((rebuilt - X).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("a fitted basis applies to new data without refitting") {
  std::mt19937_64 rng(8);
  Eigen::MatrixXd train = random_matrix(50, 3, rng);
  Eigen::MatrixXd test = random_matrix(20, 3, rng);
  PCABasis basis = fit_pca(train, 2);
  Eigen::MatrixXd first = extract_privileged(test, basis);
  Eigen::MatrixXd second = extract_privileged(test, basis);
  CHECK((first - second).lpNorm<Eigen::Infinity>() == 0.0);
  // Refitting on different data must not be implied by extraction.
  PCABasis basis_after = fit_pca(train, 2);
  CHECK((basis.components - basis_after.components).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("invalid component counts and degenerate data are rejected") {
  std::mt19937_64 rng(9);
  Eigen::MatrixXd X = random_matrix(10, 3, rng);
  CHECK_THROWS_AS(fit_pca(X, 4), DataError);       // k > d
  CHECK_THROWS_AS(fit_pca(X, 0.0), DataError);     // fraction must be positive
  CHECK_THROWS_AS(fit_pca(X, -1.0), DataError);
  Eigen::MatrixXd constant = Eigen::MatrixXd::Ones(5, 2);
  CHECK_THROWS_AS(fit_pca(constant, 1), DataError);  // zero covariance
  Eigen::MatrixXd one_row = random_matrix(1, 3, rng);
  CHECK_THROWS_AS(fit_pca(one_row, 1), DataError);   // l < 2
}

TEST_CASE("extract_privileged rejects dimension mismatches") {
  std::mt19937_64 rng(10);
  Eigen::MatrixXd X = random_matrix(12, 3, rng);
  PCABasis basis = fit_pca(X, 2);
  Eigen::MatrixXd wrong = random_matrix(4, 2, rng);
  CHECK_THROWS_AS(extract_privileged(wrong, basis), DataError);
}
