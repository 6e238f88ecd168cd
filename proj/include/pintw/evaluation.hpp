#ifndef PINTW_EVALUATION_HPP_
#define PINTW_EVALUATION_HPP_

#include <optional>
#include <string>
#include <vector>

#include "pintw/dataset.hpp"
#include "pintw/qp.hpp"

namespace pintw {

double accuracy(const Eigen::VectorXi& preds, const Eigen::VectorXi& truth);

/// 2PR / (P + R); 0 when P + R == 0 (no-positive-predictions convention).
double f1_score(const Eigen::VectorXi& preds, const Eigen::VectorXi& truth,
                int positive_label);

/// Hyperparameter grid searched in deterministic order; ties in tuning
/// accuracy resolve toward smaller c1 + c2, then smaller sigma.
struct HyperGrid {
  std::vector<double> c;      // applied to both c1 and c2
  std::vector<double> gamma;
  std::vector<double> tau;
  std::vector<double> sigma;  // ignored for linear kernels

  static HyperGrid defaults();
};

struct FoldResult {
  double accuracy = 0.0;
  double f1 = 0.0;
  Hyperparams chosen;
  double train_seconds = 0.0;
};

struct CVReport {
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double mean_f1 = 0.0;

  /// One record per line; deterministic (timings excluded unless asked).
  std::string to_text(bool include_timings = false) const;
};

struct CVOptions {
  int folds = 5;
  double tuning_fraction = 0.10;  // of the training portion, rejoins for the final fit
  double pca_components = 0.95;   // privileged synthesis when ds lacks it
  KernelKind kernel = KernelKind::rbf;
  std::uint64_t seed = 0;
  SolverConfig solver{};
};

/// Stratified k-fold cross-validation with per-fold grid tuning. Multiclass
/// labels go through the one-vs-rest trainer; PCA privileged features are
/// fit on each fold's training data only.
CVReport kfold_cv(const Dataset& ds, const HyperGrid& grid, const CVOptions& opt);

/// Stratified fold assignment: fold id per sample, deterministic in seed.
std::vector<int> stratified_folds(const Eigen::VectorXi& labels, int k,
                                  std::uint64_t seed);

// ---- Per-image detection evaluation ----

struct BBox {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  std::optional<double> score;

  double area() const { return (x_max - x_min) * (y_max - y_min); }
  bool valid() const { return x_max > x_min && y_max > y_min; }
};

/// Intersection over union, in [0, 1].
double bbox_overlap(const BBox& d, const BBox& g);

struct MatchResult {
  int tp = 0, fp = 0, fn = 0;
  std::vector<std::pair<int, int>> pairs;  // (detection idx, ground-truth idx)
};

/// Greedy matching in decreasing score order; each ground truth matches at
/// most once, and only overlaps strictly above `threshold` count.
MatchResult match_detections(const std::vector<BBox>& dets,
                             const std::vector<BBox>& gts,
                             double threshold = 0.5);

struct CurvePoint {
  double fppi = 0.0;
  double miss_rate = 0.0;
  double score_threshold = 0.0;
};

/// Miss rate vs false positives per image, one point per score threshold,
/// sorted by FPPI. Throws DataError when no ground truths exist.
std::vector<CurvePoint> missrate_fppi_curve(
    const std::vector<std::vector<BBox>>& detections_per_image,
    const std::vector<std::vector<BBox>>& gts_per_image,
    const std::vector<double>& score_thresholds, double overlap_threshold = 0.5);

}  // namespace pintw

#endif  // PINTW_EVALUATION_HPP_
