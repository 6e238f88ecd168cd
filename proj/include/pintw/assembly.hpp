#ifndef PINTW_ASSEMBLY_HPP_
#define PINTW_ASSEMBLY_HPP_

#include "pintw/dataset.hpp"
#include "pintw/qp.hpp"

namespace pintw {

enum class WhichClass { class1, class2 };

/// Dual of the privileged twin machine, assembled by symbolic expansion of
/// the Wolfe dual objective
///   1/2 ||B'(a4-a3) - A'a1||^2 + 1/2 ||a1||^2
///   + 1/(2g) ||Bs'(a3 + a4/tau - c1 e) - As'a2||^2 + 1/(2g) ||a2||^2
///   + e'(a4 - a3)
/// over x = (a1, a2, a3, a4) with a3, a4 >= 0, a1, a2 free, and the two
/// equality constraints from the intercept stationarity conditions.
/// class2 is the mirror image (A <-> B, A* <-> B*, c1 -> c2).
GeneralQP assemble_pin_twsvmpi_dual(WhichClass which, const ClassPartition& part,
                                    const Hyperparams& hp);

/// Same structure on the augmented Gram blocks M = [K(A, X') e1],
/// N = [K(B, X') e2], M* = [K(A*, X*') e1*], N* = [K(B*, X*') e2*].
GeneralQP assemble_pin_twsvmpi_kernel_dual(WhichClass which,
                                           const ClassPartition& part,
                                           const Hyperparams& hp);

/// Baseline (no privileged info) pinball twin dual over x = (alpha, beta) >= 0
/// with the per-sample coupling alpha + beta/tau = c. The near-singular
/// normal matrix is stabilized as (H'H + ridge I)^-1. ridge < 0 selects the
/// default 1e-7 * trace / n.
GeneralQP assemble_pin_twsvm_dual(WhichClass which, const ClassPartition& part,
                                  const Hyperparams& hp, double ridge = -1.0);

/// Gram blocks shared by the kernel dual and the kernel trainer.
struct KernelBlocks {
  Eigen::MatrixXd M;       // m1 x (l+1)
  Eigen::MatrixXd N;       // m2 x (l+1)
  Eigen::MatrixXd M_star;  // m1 x (l+1)
  Eigen::MatrixXd N_star;  // m2 x (l+1)
};

KernelBlocks kernel_blocks(const ClassPartition& part, const KernelSpec& spec);

double default_ridge(const Eigen::MatrixXd& normal_matrix);

}  // namespace pintw

#endif  // PINTW_ASSEMBLY_HPP_
