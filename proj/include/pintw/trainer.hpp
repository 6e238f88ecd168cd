#ifndef PINTW_TRAINER_HPP_
#define PINTW_TRAINER_HPP_

#include <map>
#include <optional>
#include <vector>

#include "pintw/assembly.hpp"
#include "pintw/dataset.hpp"
#include "pintw/solver.hpp"

namespace pintw {

enum class ModelVariant { linear, kernel };
enum class DistanceRule { paper_squared_norm, euclidean };

std::string to_string(ModelVariant v);
std::string to_string(DistanceRule r);
DistanceRule distance_rule_from_string(const std::string& name);

/// Pinball loss on margin residual u = 1 - y * score: max(u, -tau u).
double pinball_loss(double tau, int y, double score);

/// One nonparallel hyperplane plus its privileged-space correcting function.
/// Linear: score(x) = w'x + b. Kernel: score(x) = K(x, X')w + b with the
/// stored support matrix. Correcting parameters are diagnostics only.
struct Hyperplane {
  Eigen::VectorXd w;
  double b = 0.0;
  Eigen::VectorXd w_star;
  double b_star = 0.0;
};

struct Model {
  ModelVariant variant = ModelVariant::linear;
  KernelSpec kernel{};
  Hyperplane plane_pos;  // proximal to class +1
  Hyperplane plane_neg;  // proximal to class -1
  Eigen::MatrixXd support;       // kernel variant: training features (l x d)
  Eigen::MatrixXd support_priv;  // kernel variant: training privileged rows
  Hyperparams hp{};
  DistanceRule distance_rule = DistanceRule::paper_squared_norm;
  std::optional<Scaler> scaler;
  bool privileged_terms = true;  // false for the baseline machine

  Eigen::Index input_dim() const;
};

/// Per-solve diagnostics surfaced with the trained model.
struct TrainDiagnostics {
  DualSolution class1;
  DualSolution class2;
};

/// Trains the privileged twin machine. Linear path when
/// hp.kernel.kind == linear, Gram path otherwise; `force_kernel_path`
/// runs the Gram path regardless (e.g. kernel machinery with a linear kernel).
Model train_pin_twsvmpi(const ClassPartition& part, const Hyperparams& hp,
                        const SolverConfig& cfg,
                        TrainDiagnostics* diag = nullptr,
                        bool force_kernel_path = false);

/// Baseline pinball twin machine (no privileged terms). tau > 0 uses the
/// dual path; tau == 0 solves the (hinge) primal directly with the oracle.
Model train_pin_twsvm(const ClassPartition& part, const Hyperparams& hp,
                      const SolverConfig& cfg, TrainDiagnostics* diag = nullptr);

/// Classical TWSVM via its box-constrained dual; test reference for the
/// tau = 0 reduction.
Model train_classic_twsvm(const ClassPartition& part, const Hyperparams& hp,
                          const SolverConfig& cfg);

/// Raw plane scores (x'w + b or Gram form), before the distance rule.
double plane_score(const Model& model, const Hyperplane& plane,
                   const Eigen::VectorXd& x);

/// Distance of x to a plane under the model's distance rule.
double plane_distance(const Model& model, const Hyperplane& plane,
                      const Eigen::VectorXd& x);

/// Two-hyperplane decision rule; ties go to +1.
int predict(const Model& model, const Eigen::VectorXd& x);
Eigen::VectorXi predict(const Model& model, const Eigen::MatrixXd& X);

/// Correcting-function values w*'x* + b* per privileged row. Diagnostic only.
Eigen::VectorXd correcting_values(const Model& model, const Hyperplane& plane,
                                  const Eigen::MatrixXd& X_star);

/// One-vs-rest reduction for multiclass labels.
struct MulticlassModel {
  std::vector<int> class_ids;  // ascending
  std::vector<Model> models;   // one per class id
};

/// Requires ds.privileged (extract it first, e.g. with fit_pca).
MulticlassModel train_multiclass(const Dataset& ds, const Hyperparams& hp,
                                 const SolverConfig& cfg);

int predict(const MulticlassModel& model, const Eigen::VectorXd& x);
Eigen::VectorXi predict(const MulticlassModel& model, const Eigen::MatrixXd& X);

}  // namespace pintw

#endif  // PINTW_TRAINER_HPP_
