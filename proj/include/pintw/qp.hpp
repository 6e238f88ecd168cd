#ifndef PINTW_QP_HPP_
#define PINTW_QP_HPP_

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace pintw {

/// Block index ranges of the four multiplier blocks of a twin-machine dual,
/// plus the data needed by the closed-form feasible initialization.
struct PinBlockLayout {
  Eigen::Index m1 = 0;  // sizes: blocks 1 and 2 have m1 entries
  Eigen::Index m2 = 0;  // blocks 3 and 4 have m2 entries
  double c = 0.0;       // trade-off parameter of this class's dual
  double tau = 0.0;

  Eigen::Index offset(int block) const {
    switch (block) {
      case 0: return 0;
      case 1: return m1;
      case 2: return 2 * m1;
      default: return 2 * m1 + m2;
    }
  }
  Eigen::Index size(int block) const { return block < 2 ? m1 : m2; }
};

/// minimize 1/2 x'Qx + f'x  subject to  Cx = D,  x_i >= 0 for nonneg[i].
/// Components with nonneg[i] == false are unconstrained in sign.
struct GeneralQP {
  Eigen::MatrixXd Q;
  Eigen::VectorXd f;
  Eigen::MatrixXd C;  // r x n
  Eigen::VectorXd D;  // r
  Eigen::Array<bool, Eigen::Dynamic, 1> nonneg;
  std::optional<PinBlockLayout> layout;
  double objective_constant = 0.0;  // dropped from f; restores the source dual value

  Eigen::Index size() const { return f.size(); }
  double objective(const Eigen::VectorXd& x) const {
    return 0.5 * x.dot(Q * x) + f.dot(x);
  }
};

struct DualSolution {
  Eigen::VectorXd x;
  double objective = 0.0;      // 1/2 x'Qx + f'x (constant excluded)
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SolverConfig {
  double tol = 1e-6;
  int max_iter = 100000;
  int working_set_size = 3;
  int oracle_threshold = 64;  // below this size, dispatch straight to the dense oracle
  bool verbose = false;
};

/// Residual summary of a candidate point against the QP's KKT system.
struct KktReport {
  double equality_residual = 0.0;      // ||Cx - D||_inf
  double min_x = 0.0;                  // min over box-constrained components
  double stationarity = 0.0;           // ||projected gradient||_inf
  double complementary_slackness = 0.0;
};

KktReport kkt_report(const GeneralQP& qp, const Eigen::VectorXd& x);

}  // namespace pintw

#endif  // PINTW_QP_HPP_
