#include "pintw/assembly.hpp"

#include <Eigen/Cholesky>

namespace pintw {
namespace {

// Shared expansion for the privileged dual. `P` is the class the plane is
// proximal to, `R` the other class; `c` is that class's trade-off parameter.
// Variable order x = (a1, a2, a3, a4), sizes (p, p, r, r).
GeneralQP assemble_privileged(const Eigen::MatrixXd& P, const Eigen::MatrixXd& R,
                              const Eigen::MatrixXd& Ps, const Eigen::MatrixXd& Rs,
                              double c, double gamma, double tau) {
  if (tau <= 0) throw DataError("privileged dual undefined at tau = 0; use the primal path");
  if (P.rows() == 0 || R.rows() == 0) throw DataError("empty class in dual assembly");

  const Eigen::Index p = P.rows();
  const Eigen::Index r = R.rows();
  const Eigen::Index n = 2 * p + 2 * r;

  GeneralQP qp;
  qp.Q = Eigen::MatrixXd::Zero(n, n);
  qp.f = Eigen::VectorXd::Zero(n);

  // Feature-space term: 1/2 || E x ||^2 with E x = R'(a4 - a3) - P'a1.
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(P.cols(), n);
  E.middleCols(0, p) = -P.transpose();
  E.middleCols(2 * p, r) = -R.transpose();
  E.middleCols(2 * p + r, r) = R.transpose();
  qp.Q += E.transpose() * E;

  // Correcting-space term: 1/(2g) || Es x + z0 ||^2,
  // Es x + z0 = Rs'(a3 + a4/tau - c e) - Ps'a2.
  Eigen::MatrixXd Es = Eigen::MatrixXd::Zero(Ps.cols(), n);
  Es.middleCols(p, p) = -Ps.transpose();
  Es.middleCols(2 * p, r) = Rs.transpose();
  Es.middleCols(2 * p + r, r) = Rs.transpose() / tau;
  Eigen::VectorXd z0 = -c * Rs.colwise().sum().transpose();
  qp.Q += (Es.transpose() * Es) / gamma;
  qp.f += (Es.transpose() * z0) / gamma;
  qp.objective_constant = z0.squaredNorm() / (2.0 * gamma);

  // Identity terms from eliminating the projection variables.
  qp.Q.block(0, 0, p, p) += Eigen::MatrixXd::Identity(p, p);
  qp.Q.block(p, p, p, p) += Eigen::MatrixXd::Identity(p, p) / gamma;

  // Linear term e'(a4 - a3).
  qp.f.segment(2 * p, r).array() -= 1.0;
  qp.f.segment(2 * p + r, r).array() += 1.0;

  qp.Q = 0.5 * (qp.Q + qp.Q.transpose()).eval();

  // Intercept stationarity: e'a1 - e'(a4 - a3) = 0 and
  // e'a2 - e'a3 - (1/tau) e'a4 = -c r.
  qp.C = Eigen::MatrixXd::Zero(2, n);
  qp.C.row(0).segment(0, p).setOnes();
  qp.C.row(0).segment(2 * p, r).setOnes();
  qp.C.row(0).segment(2 * p + r, r).setConstant(-1.0);
  qp.C.row(1).segment(p, p).setOnes();
  qp.C.row(1).segment(2 * p, r).setConstant(-1.0);
  qp.C.row(1).segment(2 * p + r, r).setConstant(-1.0 / tau);
  qp.D = Eigen::VectorXd::Zero(2);
  qp.D[1] = -c * static_cast<double>(r);

  // a1, a2 are equality-constraint multipliers (free); a3, a4 >= 0.
  qp.nonneg = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, true);
  qp.nonneg.segment(0, 2 * p) = false;

  qp.layout = PinBlockLayout{p, r, c, tau};
  return qp;
}

void require_privileged(const ClassPartition& part) {
  if (!part.has_privileged()) {
    throw DataError("privileged matrices required for the privileged dual");
  }
}

}  // namespace

double default_ridge(const Eigen::MatrixXd& normal_matrix) {
  return 1e-7 * normal_matrix.trace() / static_cast<double>(normal_matrix.rows());
}

GeneralQP assemble_pin_twsvmpi_dual(WhichClass which, const ClassPartition& part,
                                    const Hyperparams& hp) {
  require_privileged(part);
  if (which == WhichClass::class1) {
    return assemble_privileged(part.A, part.B, part.A_star, part.B_star,
                               hp.c1, hp.gamma, hp.tau);
  }
  return assemble_privileged(part.B, part.A, part.B_star, part.A_star,
                             hp.c2, hp.gamma, hp.tau);
}

KernelBlocks kernel_blocks(const ClassPartition& part, const KernelSpec& spec) {
  const Eigen::Index m1 = part.m1();
  const Eigen::Index m2 = part.m2();
  const Eigen::Index l = m1 + m2;

  Eigen::MatrixXd X(l, part.A.cols());
  X << part.A, part.B;
  Eigen::MatrixXd Xs(l, part.A_star.cols());
  Xs << part.A_star, part.B_star;

  KernelBlocks kb;
  kb.M.resize(m1, l + 1);
  kb.M << gram(spec, part.A, X), Eigen::VectorXd::Ones(m1);
  kb.N.resize(m2, l + 1);
  kb.N << gram(spec, part.B, X), Eigen::VectorXd::Ones(m2);
  kb.M_star.resize(m1, l + 1);
  kb.M_star << gram(spec, part.A_star, Xs), Eigen::VectorXd::Ones(m1);
  kb.N_star.resize(m2, l + 1);
  kb.N_star << gram(spec, part.B_star, Xs), Eigen::VectorXd::Ones(m2);
  return kb;
}

GeneralQP assemble_pin_twsvmpi_kernel_dual(WhichClass which,
                                           const ClassPartition& part,
                                           const Hyperparams& hp) {
  require_privileged(part);
  KernelBlocks kb = kernel_blocks(part, hp.kernel);
  if (which == WhichClass::class1) {
    return assemble_privileged(kb.M, kb.N, kb.M_star, kb.N_star,
                               hp.c1, hp.gamma, hp.tau);
  }
  return assemble_privileged(kb.N, kb.M, kb.N_star, kb.M_star,
                             hp.c2, hp.gamma, hp.tau);
}

GeneralQP assemble_pin_twsvm_dual(WhichClass which, const ClassPartition& part,
                                  const Hyperparams& hp, double ridge) {
  if (hp.tau <= 0) throw DataError("baseline dual undefined at tau = 0; use the primal path");
  const Eigen::MatrixXd& P = which == WhichClass::class1 ? part.A : part.B;
  const Eigen::MatrixXd& R = which == WhichClass::class1 ? part.B : part.A;
  const double c = which == WhichClass::class1 ? hp.c1 : hp.c2;

  Eigen::MatrixXd H(P.rows(), P.cols() + 1);
  H << P, Eigen::VectorXd::Ones(P.rows());
  Eigen::MatrixXd G(R.rows(), R.cols() + 1);
  G << R, Eigen::VectorXd::Ones(R.rows());

  Eigen::MatrixXd HtH = H.transpose() * H;
  const double rho = ridge < 0 ? default_ridge(HtH) : ridge;
  HtH.diagonal().array() += rho;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(HtH);
  if (ldlt.info() != Eigen::Success) {
    throw SolverError("singular H'H in baseline dual (increase ridge)");
  }
  Eigen::MatrixXd S = G * ldlt.solve(G.transpose());
  S = 0.5 * (S + S.transpose()).eval();

  const Eigen::Index r = R.rows();
  GeneralQP qp;
  qp.Q = Eigen::MatrixXd::Zero(2 * r, 2 * r);
  qp.Q.topLeftCorner(r, r) = S;
  qp.Q.topRightCorner(r, r) = -S;
  qp.Q.bottomLeftCorner(r, r) = -S;
  qp.Q.bottomRightCorner(r, r) = S;
  qp.f = Eigen::VectorXd::Zero(2 * r);
  qp.f.head(r).array() = -1.0;
  qp.f.tail(r).array() = 1.0;
  qp.C = Eigen::MatrixXd::Zero(r, 2 * r);
  qp.C.leftCols(r).setIdentity();
  qp.C.rightCols(r) = Eigen::MatrixXd::Identity(r, r) / hp.tau;
  qp.D = Eigen::VectorXd::Constant(r, c);
  qp.nonneg = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(2 * r, true);
  return qp;
}

}  // namespace pintw
