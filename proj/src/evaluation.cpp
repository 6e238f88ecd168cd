#include "pintw/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "pintw/pca.hpp"
#include "pintw/trainer.hpp"

namespace pintw {
namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

Dataset subset(const Dataset& ds, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.num_features());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  if (ds.privileged) {
    out.privileged = Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()),
                                     ds.privileged->cols());
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.features.row(r) = ds.features.row(rows[i]);
    out.labels[r] = ds.labels[rows[i]];
    if (ds.privileged) out.privileged->row(r) = ds.privileged->row(rows[i]);
  }
  out.feature_names = ds.feature_names;
  return out;
}

bool is_binary_pm1(const Eigen::VectorXi& labels) {
  return std::all_of(labels.begin(), labels.end(),
                     [](int y) { return y == 1 || y == -1; });
}

double macro_f1(const Eigen::VectorXi& preds, const Eigen::VectorXi& truth) {
  std::set<int> ids(truth.begin(), truth.end());
  double sum = 0.0;
  for (int id : ids) sum += f1_score(preds, truth, id);
  return sum / static_cast<double>(ids.size());
}

// Trains on `train` (standardize, then synthesize privileged features by PCA
// when the dataset carries none) and scores accuracy on `test`.
struct FitResult {
  Eigen::VectorXi preds;
  double seconds = 0.0;
};

FitResult fit_and_predict(const Dataset& train, const Dataset& test,
                          const Hyperparams& hp, const CVOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  auto [scaled, scaler] = standardize(train);
  if (!scaled.privileged) {
    PCABasis basis = fit_pca(scaled.features, opt.pca_components);
    scaled.privileged = extract_privileged(scaled.features, basis);
  }

  Eigen::MatrixXd test_X = scaler.apply(test.features);
  FitResult out;
  if (is_binary_pm1(scaled.labels)) {
    Model model = train_pin_twsvmpi(partition_by_class(scaled), hp, opt.solver);
    out.preds = predict(model, test_X);
  } else {
    MulticlassModel model = train_multiclass(scaled, hp, opt.solver);
    out.preds = predict(model, test_X);
  }
  out.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<Hyperparams> grid_candidates(const HyperGrid& grid, const CVOptions& opt) {
  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  std::vector<double> cs = sorted(grid.c);
  std::vector<double> sigmas = opt.kernel == KernelKind::rbf
                                   ? sorted(grid.sigma)
                                   : std::vector<double>{1.0};
  std::vector<Hyperparams> out;
  // c outermost, sigma next: with first-strict-max selection this realizes
  // the smaller-c, then smaller-sigma tie-break.
  for (double c : cs) {
    for (double sigma : sigmas) {
      for (double gamma : grid.gamma) {
        for (double tau : grid.tau) {
          Hyperparams hp;
          hp.c1 = hp.c2 = c;
          hp.gamma = gamma;
          hp.tau = tau;
          hp.kernel.kind = opt.kernel;
          hp.kernel.sigma = sigma;
          hp.seed = opt.seed;
          out.push_back(hp);
        }
      }
    }
  }
  if (out.empty()) throw DataError("empty hyperparameter grid");
  return out;
}

}  // namespace

double accuracy(const Eigen::VectorXi& preds, const Eigen::VectorXi& truth) {
  if (preds.size() != truth.size() || truth.size() == 0) {
    throw DataError("accuracy: prediction/truth length mismatch");
  }
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) hits += preds[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double f1_score(const Eigen::VectorXi& preds, const Eigen::VectorXi& truth,
                int positive_label) {
  if (preds.size() != truth.size() || truth.size() == 0) {
    throw DataError("f1_score: prediction/truth length mismatch");
  }
  int tp = 0, fp = 0, fn = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const bool p = preds[i] == positive_label;
    const bool t = truth[i] == positive_label;
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
  }
  const double prec = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double rec = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  return prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
}

HyperGrid HyperGrid::defaults() {
  HyperGrid g;
  g.c = {1.0};
  g.gamma = {1.0};
  g.tau = {0.1, 0.25, 0.5, 0.75, 1.0};
  g.sigma = {1.0, 2.0};
  return g;
}

std::string CVReport::to_text(bool include_timings) const {
  std::string out = "fold\taccuracy\tf1\tc1\tgamma\ttau\tsigma";
  if (include_timings) out += "\ttrain_seconds";
  out += "\n";
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const FoldResult& f = folds[i];
    out += std::to_string(i) + "\t" + format_double(f.accuracy) + "\t" +
           format_double(f.f1) + "\t" + format_double(f.chosen.c1) + "\t" +
           format_double(f.chosen.gamma) + "\t" + format_double(f.chosen.tau) +
           "\t" + format_double(f.chosen.kernel.sigma);
    if (include_timings) out += "\t" + format_double(f.train_seconds);
    out += "\n";
  }
  out += "mean_accuracy\t" + format_double(mean_accuracy) + "\n";
  out += "std_accuracy\t" + format_double(std_accuracy) + "\n";
  out += "mean_f1\t" + format_double(mean_f1) + "\n";
  return out;
}

std::vector<int> stratified_folds(const Eigen::VectorXi& labels, int k,
                                  std::uint64_t seed) {
  if (k < 2) throw DataError("stratified_folds needs k >= 2");
  if (labels.size() < k) throw DataError("fewer samples than folds");
  std::map<int, std::vector<Eigen::Index>> by_class;
  for (Eigen::Index i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  std::vector<int> fold(static_cast<std::size_t>(labels.size()), 0);
  std::mt19937_64 rng(seed);
  int next = 0;  // rotates across classes so fold sizes stay balanced
  for (auto& [label, idx] : by_class) {
    // Fisher-Yates with our own RNG: std::shuffle is not
    // implementation-stable across standard libraries.
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(idx[i - 1], idx[pick(rng)]);
    }
    for (Eigen::Index i : idx) {
      fold[static_cast<std::size_t>(i)] = next;
      next = (next + 1) % k;
    }
  }
  return fold;
}

CVReport kfold_cv(const Dataset& ds, const HyperGrid& grid, const CVOptions& opt) {
  ds.validate();
  std::vector<int> assignment = stratified_folds(ds.labels, opt.folds, opt.seed);
  std::vector<Hyperparams> candidates = grid_candidates(grid, opt);

  CVReport report;
  for (int f = 0; f < opt.folds; ++f) {
    std::vector<Eigen::Index> train_rows, test_rows;
    for (Eigen::Index i = 0; i < ds.num_samples(); ++i) {
      (assignment[static_cast<std::size_t>(i)] == f ? test_rows : train_rows)
          .push_back(i);
    }
    Dataset train = subset(ds, train_rows);
    Dataset test = subset(ds, test_rows);

    // Carve a tuning subset out of the training portion; it rejoins the
    // training set for the final fit.
    const int tuning_k = std::max(
        2, static_cast<int>(std::lround(1.0 / std::max(opt.tuning_fraction, 1e-9))));
    std::vector<int> inner =
        stratified_folds(train.labels, tuning_k, opt.seed + 1000 + f);
    std::vector<Eigen::Index> core_rows, tune_rows;
    for (Eigen::Index i = 0; i < train.num_samples(); ++i) {
      (inner[static_cast<std::size_t>(i)] == 0 ? tune_rows : core_rows).push_back(i);
    }
    Dataset core = subset(train, core_rows);
    Dataset tune = subset(train, tune_rows);

    FoldResult fr;
    double best_acc = -1.0;
    for (const Hyperparams& hp : candidates) {
      const double acc =
          accuracy(fit_and_predict(core, tune, hp, opt).preds, tune.labels);
      if (acc > best_acc) {
        best_acc = acc;
        fr.chosen = hp;
      }
    }

    FitResult final_fit = fit_and_predict(train, test, fr.chosen, opt);
    fr.accuracy = accuracy(final_fit.preds, test.labels);
    fr.f1 = is_binary_pm1(test.labels) ? f1_score(final_fit.preds, test.labels, 1)
                                       : macro_f1(final_fit.preds, test.labels);
    fr.train_seconds = final_fit.seconds;
    report.folds.push_back(fr);
  }

  const auto n = static_cast<double>(report.folds.size());
  for (const FoldResult& f : report.folds) {
    report.mean_accuracy += f.accuracy / n;
    report.mean_f1 += f.f1 / n;
  }
  for (const FoldResult& f : report.folds) {
    const double d = f.accuracy - report.mean_accuracy;
    report.std_accuracy += d * d / n;
  }
  report.std_accuracy = std::sqrt(report.std_accuracy);
  return report;
}

double bbox_overlap(const BBox& d, const BBox& g) {
  const double ix = std::max(
      0.0, std::min(d.x_max, g.x_max) - std::max(d.x_min, g.x_min));
  const double iy = std::max(
      0.0, std::min(d.y_max, g.y_max) - std::max(d.y_min, g.y_min));
  const double inter = ix * iy;
  const double uni = d.area() + g.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

MatchResult match_detections(const std::vector<BBox>& dets,
                             const std::vector<BBox>& gts, double threshold) {
  std::vector<int> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double sa = dets[static_cast<std::size_t>(a)].score.value_or(
        -std::numeric_limits<double>::infinity());
    const double sb = dets[static_cast<std::size_t>(b)].score.value_or(
        -std::numeric_limits<double>::infinity());
    return sa > sb;
  });

  MatchResult res;
  std::vector<bool> taken(gts.size(), false);
  for (int di : order) {
    double best = 0.0;
    int best_gt = -1;
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (taken[gi]) continue;
      const double ov = bbox_overlap(dets[static_cast<std::size_t>(di)], gts[gi]);
      if (ov > best) {
        best = ov;
        best_gt = static_cast<int>(gi);
      }
    }
    if (best_gt >= 0 && best > threshold) {
      taken[static_cast<std::size_t>(best_gt)] = true;
      ++res.tp;
      res.pairs.emplace_back(di, best_gt);
    } else {
      ++res.fp;
    }
  }
  res.fn = static_cast<int>(gts.size()) - res.tp;
  return res;
}

std::vector<CurvePoint> missrate_fppi_curve(
    const std::vector<std::vector<BBox>>& detections_per_image,
    const std::vector<std::vector<BBox>>& gts_per_image,
    const std::vector<double>& score_thresholds, double overlap_threshold) {
  if (detections_per_image.size() != gts_per_image.size() ||
      detections_per_image.empty()) {
    throw DataError("detection and ground-truth image counts must match");
  }
  std::size_t total_gts = 0;
  for (const auto& g : gts_per_image) total_gts += g.size();
  if (total_gts == 0) {
    throw DataError("miss rate undefined: no ground-truth boxes");
  }

  std::vector<CurvePoint> curve;
  for (double t : score_thresholds) {
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t img = 0; img < detections_per_image.size(); ++img) {
      std::vector<BBox> kept;
      for (const BBox& d : detections_per_image[img]) {
        if (!d.score) throw DataError("curve detections require scores");
        if (*d.score >= t) kept.push_back(d);
      }
      MatchResult m = match_detections(kept, gts_per_image[img], overlap_threshold);
      tp += m.tp;
      fp += m.fp;
      fn += m.fn;
    }
    CurvePoint pt;
    pt.score_threshold = t;
    pt.fppi = static_cast<double>(fp) /
              static_cast<double>(detections_per_image.size());
    pt.miss_rate = static_cast<double>(fn) / static_cast<double>(tp + fn);
    curve.push_back(pt);
  }
  std::stable_sort(curve.begin(), curve.end(),
                   [](const CurvePoint& a, const CurvePoint& b) {
                     return a.fppi < b.fppi;
                   });
  return curve;
}

}  // namespace pintw
