#include "pintw/kernels.hpp"

#include <cmath>

#include "pintw/errors.hpp"

namespace pintw {

std::string to_string(KernelKind kind) {
  return kind == KernelKind::linear ? "linear" : "rbf";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "rbf") return KernelKind::rbf;
  throw DataError("unknown kernel '" + name + "' (expected linear or rbf)");
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& z) {
  if (x.size() != z.size()) {
    throw DataError("kernel_eval dimension mismatch: " + std::to_string(x.size()) +
                    " vs " + std::to_string(z.size()));
  }
  if (spec.kind == KernelKind::linear) return x.dot(z);
  return std::exp(-(x - z).squaredNorm() / (2.0 * spec.sigma * spec.sigma));
}

Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& Xa,
                     const Eigen::MatrixXd& Xb) {
  if (Xa.cols() != Xb.cols()) {
    throw DataError("gram dimension mismatch: " + std::to_string(Xa.cols()) +
                    " vs " + std::to_string(Xb.cols()));
  }
  if (spec.kind == KernelKind::linear) return Xa * Xb.transpose();

  // ||a - b||^2 = ||a||^2 + ||b||^2 - 2 a.b, clamped against round-off.
  Eigen::VectorXd na = Xa.rowwise().squaredNorm();
  Eigen::VectorXd nb = Xb.rowwise().squaredNorm();
  Eigen::MatrixXd sq = (-2.0 * (Xa * Xb.transpose())).colwise() + na;
  sq.rowwise() += nb.transpose();
  return (sq.cwiseMax(0.0) / (-2.0 * spec.sigma * spec.sigma)).array().exp();
}

}  // namespace pintw
