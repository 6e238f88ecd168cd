#include "pintw/pca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "pintw/errors.hpp"

namespace pintw {

PCABasis fit_pca(const Eigen::MatrixXd& X, double k_or_fraction) {
  const Eigen::Index l = X.rows();
  const Eigen::Index d = X.cols();
  if (l < 2) throw DataError("fit_pca needs at least 2 rows");
  const Eigen::Index k_max = std::min(l - 1, d);

  PCABasis basis;
  basis.mean = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - basis.mean.transpose();
  Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(l - 1);
  const double total = cov.trace();
  if (total <= 1e-300) throw DataError("fit_pca: data has zero variance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw DataError("fit_pca: eigensolver failed");

  // Eigen returns ascending order; take the tail, largest first.
  Eigen::Index k;
  if (k_or_fraction >= 1.0) {
    k = static_cast<Eigen::Index>(std::llround(k_or_fraction));
    if (static_cast<double>(k) != k_or_fraction || k < 1 || k > k_max) {
      throw DataError("fit_pca: component count must be an integer in [1, " +
                      std::to_string(k_max) + "]");
    }
  } else {
    if (k_or_fraction <= 0.0) throw DataError("fit_pca: fraction must be positive");
    double cum = 0.0;
    k = k_max;
    for (Eigen::Index j = 0; j < k_max; ++j) {
      cum += std::max(0.0, eig.eigenvalues()[d - 1 - j]);
      if (cum >= k_or_fraction * total - 1e-12) {
        k = j + 1;
        break;
      }
    }
  }

  basis.components.resize(k, d);
  basis.explained_variance.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - j);
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0) v = -v;  // deterministic sign
    basis.components.row(j) = v.transpose();
    basis.explained_variance[j] = std::max(0.0, eig.eigenvalues()[d - 1 - j]);
  }
  return basis;
}

Eigen::MatrixXd extract_privileged(const Eigen::MatrixXd& X, const PCABasis& basis) {
  if (X.cols() != basis.mean.size()) {
    throw DataError("extract_privileged: dimension " + std::to_string(X.cols()) +
                    " does not match basis dimension " +
                    std::to_string(basis.mean.size()));
  }
  return (X.rowwise() - basis.mean.transpose()) * basis.components.transpose();
}

}  // namespace pintw
