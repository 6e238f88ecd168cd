#ifndef PINTW_PCA_HPP_
#define PINTW_PCA_HPP_

#include <Eigen/Dense>

namespace pintw {

/// Orthonormal principal directions (rows), ordered by decreasing explained
/// variance. Sign convention: the largest-magnitude entry of each component
/// is positive, so fits are deterministic.
struct PCABasis {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;          // k x d
  Eigen::VectorXd explained_variance;  // k, non-increasing

  Eigen::Index num_components() const { return components.rows(); }
};

/// k_or_fraction: an integer count in [1, min(l-1, d)] when >= 1, otherwise a
/// variance fraction in (0, 1) selecting the smallest k whose cumulative
/// explained variance reaches it. Sample covariance (divisor l - 1).
PCABasis fit_pca(const Eigen::MatrixXd& X, double k_or_fraction);

/// Projects rows: (X - mean) * components'. Becomes Dataset::privileged.
Eigen::MatrixXd extract_privileged(const Eigen::MatrixXd& X, const PCABasis& basis);

}  // namespace pintw

#endif  // PINTW_PCA_HPP_
