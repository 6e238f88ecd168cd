#include "pintw/trainer.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace pintw {
namespace {

constexpr double kDegenerateNorm = 1e-12;

// Primal recovery from a privileged dual solution x = (a1, a2, a3, a4).
// `P`/`Ps` is the proximal class, `R`/`Rs` the other. On the kernel path the
// inputs are the augmented Gram blocks and the result lives in R^{l+1}.
Hyperplane recover_plane(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Ps,
                         const Eigen::MatrixXd& R, const Eigen::MatrixXd& Rs,
                         double c, double gamma, double tau,
                         const Eigen::VectorXd& x) {
  const Eigen::Index p = P.rows();
  const Eigen::Index r = R.rows();
  Eigen::VectorXd a1 = x.segment(0, p);
  Eigen::VectorXd a2 = x.segment(p, p);
  Eigen::VectorXd a3 = x.segment(2 * p, r);
  Eigen::VectorXd a4 = x.segment(2 * p + r, r);

  Hyperplane plane;
  plane.w = R.transpose() * (a4 - a3) - P.transpose() * a1;
  plane.b = (a1 - P * plane.w).mean();

  Eigen::VectorXd s = a3 + a4 / tau - Eigen::VectorXd::Constant(r, c);
  plane.w_star = (Rs.transpose() * s - Ps.transpose() * a2) / gamma;
  plane.b_star = (a2 / gamma - Ps * plane.w_star).mean();
  return plane;
}

// Collapses an augmented-space plane (coefficients over l training points
// plus one bias coordinate) into Gram coefficients and a scalar intercept.
Hyperplane collapse_augmented(const Hyperplane& aug) {
  Hyperplane plane;
  const Eigen::Index l = aug.w.size() - 1;
  plane.w = aug.w.head(l);
  plane.b = aug.w[l] + aug.b;
  const Eigen::Index ls = aug.w_star.size() - 1;
  plane.w_star = aug.w_star.head(ls);
  plane.b_star = aug.w_star[ls] + aug.b_star;
  return plane;
}

DualSolution solve_dual(const GeneralQP& qp, const SolverConfig& cfg) {
  DualSolution sol = solve_decomposition(qp, cfg);
  if (!sol.x.allFinite()) throw SolverError("dual solve produced non-finite multipliers");
  return sol;
}

void check_degenerate(const Model& model) {
  // One collapsed plane can be a legitimate optimum on heavily corrupted
  // data (the distance rule then routes every sample to the other class);
  // a model is only rejected when neither plane carries any direction.
  if (model.plane_pos.w.norm() < kDegenerateNorm &&
      model.plane_neg.w.norm() < kDegenerateNorm) {
    throw SolverError("degenerate model: both hyperplanes collapsed to zero weights");
  }
}

// Classical TWSVM dual for one class: min 1/2 a'S a - e'a over 0 <= a <= c,
// written with a slack block so the box fits the equality/nonnegativity form.
Eigen::VectorXd classic_alpha(const Eigen::MatrixXd& H, const Eigen::MatrixXd& G,
                              double c, double ridge) {
  Eigen::MatrixXd HtH = H.transpose() * H;
  HtH.diagonal().array() += ridge;
  Eigen::MatrixXd S = G * Eigen::LDLT<Eigen::MatrixXd>(HtH).solve(G.transpose());
  S = 0.5 * (S + S.transpose()).eval();

  const Eigen::Index r = G.rows();
  GeneralQP qp;
  qp.Q = Eigen::MatrixXd::Zero(2 * r, 2 * r);
  qp.Q.topLeftCorner(r, r) = S;
  qp.f = Eigen::VectorXd::Zero(2 * r);
  qp.f.head(r).array() = -1.0;
  qp.C = Eigen::MatrixXd::Zero(r, 2 * r);
  qp.C.leftCols(r).setIdentity();
  qp.C.rightCols(r).setIdentity();
  qp.D = Eigen::VectorXd::Constant(r, c);
  qp.nonneg = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(2 * r, true);
  return solve_dense_oracle(qp).x.head(r);
}

// Hinge twin primal for one class (the tau = 0 reduction): variables
// (u, xi, s) with -Gu + xi - s = e, xi >= 0, s >= 0; a small ridge on u keeps
// the plane unique and matches the dual path's stabilized inverse.
Eigen::VectorXd hinge_primal_u(const Eigen::MatrixXd& H, const Eigen::MatrixXd& G,
                               double c) {
  const Eigen::Index k = H.cols();
  const Eigen::Index r = G.rows();
  Eigen::MatrixXd HtH = H.transpose() * H;
  const double ridge = default_ridge(HtH);

  GeneralQP qp;
  qp.Q = Eigen::MatrixXd::Zero(k + 2 * r, k + 2 * r);
  qp.Q.topLeftCorner(k, k) = HtH;
  qp.Q.topLeftCorner(k, k).diagonal().array() += ridge;
  qp.f = Eigen::VectorXd::Zero(k + 2 * r);
  qp.f.segment(k, r).array() = c;
  qp.C = Eigen::MatrixXd::Zero(r, k + 2 * r);
  qp.C.leftCols(k) = -G;
  qp.C.middleCols(k, r).setIdentity();
  qp.C.rightCols(r) = -Eigen::MatrixXd::Identity(r, r);
  qp.D = Eigen::VectorXd::Ones(r);
  qp.nonneg = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(k + 2 * r, true);
  qp.nonneg.head(k).setConstant(false);
  return solve_dense_oracle(qp).x.head(k);
}

Eigen::MatrixXd augment(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd H(X.rows(), X.cols() + 1);
  H << X, Eigen::VectorXd::Ones(X.rows());
  return H;
}

Eigen::VectorXd kernel_row(const Model& model, const Eigen::VectorXd& x) {
  return gram(model.kernel, x.transpose(), model.support).transpose();
}

}  // namespace

std::string to_string(ModelVariant v) {
  return v == ModelVariant::linear ? "linear" : "kernel";
}

std::string to_string(DistanceRule r) {
  return r == DistanceRule::paper_squared_norm ? "paper_squared_norm" : "euclidean";
}

DistanceRule distance_rule_from_string(const std::string& name) {
  if (name == "paper_squared_norm") return DistanceRule::paper_squared_norm;
  if (name == "euclidean") return DistanceRule::euclidean;
  throw DataError("unknown distance rule '" + name + "'");
}

double pinball_loss(double tau, int y, double score) {
  const double u = 1.0 - static_cast<double>(y) * score;
  return std::max(u, -tau * u);
}

Eigen::Index Model::input_dim() const {
  return variant == ModelVariant::linear ? plane_pos.w.size() : support.cols();
}

Model train_pin_twsvmpi(const ClassPartition& part, const Hyperparams& hp,
                        const SolverConfig& cfg, TrainDiagnostics* diag,
                        bool force_kernel_path) {
  hp.validate();
  if (!part.has_privileged()) {
    throw DataError("privileged matrices required to train the privileged machine");
  }
  const bool kernel_path = force_kernel_path || hp.kernel.kind != KernelKind::linear;

  Model model;
  model.hp = hp;
  model.kernel = hp.kernel;
  model.privileged_terms = true;

  if (!kernel_path) {
    DualSolution s1 = solve_dual(assemble_pin_twsvmpi_dual(WhichClass::class1, part, hp), cfg);
    DualSolution s2 = solve_dual(assemble_pin_twsvmpi_dual(WhichClass::class2, part, hp), cfg);
    model.variant = ModelVariant::linear;
    model.plane_pos = recover_plane(part.A, part.A_star, part.B, part.B_star,
                                    hp.c1, hp.gamma, hp.tau, s1.x);
    model.plane_neg = recover_plane(part.B, part.B_star, part.A, part.A_star,
                                    hp.c2, hp.gamma, hp.tau, s2.x);
    if (diag) *diag = {std::move(s1), std::move(s2)};
  } else {
    KernelBlocks kb = kernel_blocks(part, hp.kernel);
    GeneralQP qp1 = assemble_pin_twsvmpi_kernel_dual(WhichClass::class1, part, hp);
    GeneralQP qp2 = assemble_pin_twsvmpi_kernel_dual(WhichClass::class2, part, hp);
    DualSolution s1 = solve_dual(qp1, cfg);
    DualSolution s2 = solve_dual(qp2, cfg);
    model.variant = ModelVariant::kernel;
    model.support.resize(part.m1() + part.m2(), part.A.cols());
    model.support << part.A, part.B;
    model.support_priv.resize(part.m1() + part.m2(), part.A_star.cols());
    model.support_priv << part.A_star, part.B_star;
    model.plane_pos = collapse_augmented(recover_plane(
        kb.M, kb.M_star, kb.N, kb.N_star, hp.c1, hp.gamma, hp.tau, s1.x));
    model.plane_neg = collapse_augmented(recover_plane(
        kb.N, kb.N_star, kb.M, kb.M_star, hp.c2, hp.gamma, hp.tau, s2.x));
    if (diag) *diag = {std::move(s1), std::move(s2)};
  }
  check_degenerate(model);
  return model;
}

Model train_pin_twsvm(const ClassPartition& part, const Hyperparams& hp,
                      const SolverConfig& cfg, TrainDiagnostics* diag) {
  hp.validate();
  Model model;
  model.hp = hp;
  model.kernel = hp.kernel;
  model.privileged_terms = false;

  // Kernel runs use the Gram rows as features; the shared assembly then
  // appends the bias column, so recovery lands in R^{l+1} either way.
  ClassPartition work = part;
  if (hp.kernel.kind != KernelKind::linear) {
    Eigen::MatrixXd X(part.m1() + part.m2(), part.A.cols());
    X << part.A, part.B;
    work.A = gram(hp.kernel, part.A, X);
    work.B = gram(hp.kernel, part.B, X);
    model.variant = ModelVariant::kernel;
    model.support = X;
  } else {
    model.variant = ModelVariant::linear;
  }

  Eigen::MatrixXd H1 = augment(work.A), G1 = augment(work.B);
  Eigen::MatrixXd HtH1 = H1.transpose() * H1;
  Eigen::MatrixXd HtH2 = G1.transpose() * G1;

  auto set_plane = [](Hyperplane& plane, const Eigen::VectorXd& u) {
    const Eigen::Index k = u.size() - 1;
    plane.w = u.head(k);
    plane.b = u[k];
  };

  if (hp.tau > 0) {
    DualSolution s1 = solve_dual(assemble_pin_twsvm_dual(WhichClass::class1, work, hp), cfg);
    DualSolution s2 = solve_dual(assemble_pin_twsvm_dual(WhichClass::class2, work, hp), cfg);
    const Eigen::Index r1 = work.m2(), r2 = work.m1();
    Eigen::VectorXd d1 = s1.x.head(r1) - s1.x.tail(r1);
    Eigen::VectorXd d2 = s2.x.head(r2) - s2.x.tail(r2);
    Eigen::MatrixXd R1 = HtH1, R2 = HtH2;
    R1.diagonal().array() += default_ridge(HtH1);
    R2.diagonal().array() += default_ridge(HtH2);
    set_plane(model.plane_pos,
              -Eigen::LDLT<Eigen::MatrixXd>(R1).solve(G1.transpose() * d1));
    set_plane(model.plane_neg,
              -Eigen::LDLT<Eigen::MatrixXd>(R2).solve(H1.transpose() * d2));
    if (diag) *diag = {std::move(s1), std::move(s2)};
  } else {
    set_plane(model.plane_pos, hinge_primal_u(H1, G1, hp.c1));
    set_plane(model.plane_neg, hinge_primal_u(G1, H1, hp.c2));
  }
  check_degenerate(model);
  return model;
}

Model train_classic_twsvm(const ClassPartition& part, const Hyperparams& hp,
                          const SolverConfig& /*cfg*/) {
  hp.validate();
  Model model;
  model.hp = hp;
  model.kernel = hp.kernel;
  model.privileged_terms = false;
  model.variant = ModelVariant::linear;

  Eigen::MatrixXd H = augment(part.A), G = augment(part.B);
  Eigen::MatrixXd HtH = H.transpose() * H;
  Eigen::MatrixXd GtG = G.transpose() * G;
  Eigen::VectorXd a1 = classic_alpha(H, G, hp.c1, default_ridge(HtH));
  Eigen::VectorXd a2 = classic_alpha(G, H, hp.c2, default_ridge(GtG));

  Eigen::MatrixXd R1 = HtH, R2 = GtG;
  R1.diagonal().array() += default_ridge(HtH);
  R2.diagonal().array() += default_ridge(GtG);
  Eigen::VectorXd u1 = -Eigen::LDLT<Eigen::MatrixXd>(R1).solve(G.transpose() * a1);
  Eigen::VectorXd u2 = -Eigen::LDLT<Eigen::MatrixXd>(R2).solve(H.transpose() * a2);
  const Eigen::Index d = part.A.cols();
  model.plane_pos.w = u1.head(d);
  model.plane_pos.b = u1[d];
  model.plane_neg.w = u2.head(d);
  model.plane_neg.b = u2[d];
  check_degenerate(model);
  return model;
}

double plane_score(const Model& model, const Hyperplane& plane,
                   const Eigen::VectorXd& x) {
  Eigen::VectorXd z = model.scaler ? model.scaler->apply(x) : x;
  if (z.size() != model.input_dim()) {
    throw DataError("input dimension " + std::to_string(z.size()) +
                    " does not match model dimension " +
                    std::to_string(model.input_dim()));
  }
  if (model.variant == ModelVariant::linear) return plane.w.dot(z) + plane.b;
  return kernel_row(model, z).dot(plane.w) + plane.b;
}

double plane_distance(const Model& model, const Hyperplane& plane,
                      const Eigen::VectorXd& x) {
  const double score = plane_score(model, plane, x);
  const double norm = plane.w.norm();
  const double denom = model.distance_rule == DistanceRule::paper_squared_norm
                           ? norm * norm
                           : norm;
  return std::abs(score) / std::max(denom, kDegenerateNorm);
}

int predict(const Model& model, const Eigen::VectorXd& x) {
  return plane_distance(model, model.plane_pos, x) <=
                 plane_distance(model, model.plane_neg, x)
             ? 1
             : -1;
}

Eigen::VectorXi predict(const Model& model, const Eigen::MatrixXd& X) {
  Eigen::VectorXi out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out[i] = predict(model, Eigen::VectorXd(X.row(i).transpose()));
  }
  return out;
}

Eigen::VectorXd correcting_values(const Model& model, const Hyperplane& plane,
                                  const Eigen::MatrixXd& X_star) {
  Eigen::MatrixXd basis = model.variant == ModelVariant::linear
                              ? X_star
                              : gram(model.kernel, X_star, model.support_priv);
  if (basis.cols() != plane.w_star.size()) {
    throw DataError("privileged dimension mismatch in correcting_values");
  }
  return (basis * plane.w_star).array() + plane.b_star;
}

MulticlassModel train_multiclass(const Dataset& ds, const Hyperparams& hp,
                                 const SolverConfig& cfg) {
  if (!ds.privileged) {
    throw DataError("multiclass training requires privileged features "
                    "(extract them first)");
  }
  std::set<int> ids(ds.labels.begin(), ds.labels.end());
  if (ids.size() < 2) throw DataError("multiclass training needs at least 2 classes");

  MulticlassModel mc;
  for (int id : ids) {
    Dataset binary = ds;
    for (Eigen::Index i = 0; i < binary.labels.size(); ++i) {
      binary.labels[i] = ds.labels[i] == id ? 1 : -1;
    }
    ClassPartition part = partition_by_class(binary);
    if (part.m1() < 2) {
      throw DataError("class " + std::to_string(id) + " has fewer than 2 samples");
    }
    mc.class_ids.push_back(id);
    mc.models.push_back(train_pin_twsvmpi(part, hp, cfg));
  }
  return mc;
}

int predict(const MulticlassModel& model, const Eigen::VectorXd& x) {
  if (model.models.empty()) throw DataError("empty multiclass model");
  // Distances compared across independently trained binary machines need a
  // common geometric scale, so the one-vs-rest vote always normalizes by
  // ||w|| even when a binary model itself uses the squared-norm rule.
  auto euclidean = [&x](const Model& m, const Hyperplane& p) {
    return std::abs(plane_score(m, p, x)) / std::max(p.w.norm(), kDegenerateNorm);
  };
  int best_id = model.class_ids.front();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < model.models.size(); ++k) {
    const Model& m = model.models[k];
    const double dp = euclidean(m, m.plane_pos);
    const double dn = euclidean(m, m.plane_neg);
    const double rel = dp / std::max(dp + dn, kDegenerateNorm);
    if (rel < best) {
      best = rel;
      best_id = model.class_ids[k];
    }
  }
  return best_id;
}

Eigen::VectorXi predict(const MulticlassModel& model, const Eigen::MatrixXd& X) {
  Eigen::VectorXi out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out[i] = predict(model, Eigen::VectorXd(X.row(i).transpose()));
  }
  return out;
}

}  // namespace pintw
