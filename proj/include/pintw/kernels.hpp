#ifndef PINTW_KERNELS_HPP_
#define PINTW_KERNELS_HPP_

#include <Eigen/Dense>
#include <string>

namespace pintw {

enum class KernelKind { linear, rbf };

/// rbf convention: K(x, z) = exp(-||x - z||^2 / (2 sigma^2)).
struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double sigma = 1.0;
};

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& z);

/// Gram matrix G(i, j) = K(row i of Xa, row j of Xb).
Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& Xa,
                     const Eigen::MatrixXd& Xb);

}  // namespace pintw

#endif  // PINTW_KERNELS_HPP_
