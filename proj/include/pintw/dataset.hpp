#ifndef PINTW_DATASET_HPP_
#define PINTW_DATASET_HPP_

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "pintw/errors.hpp"
#include "pintw/kernels.hpp"

namespace pintw {

/// Training data: l samples with d features, integer labels, and an optional
/// l x d* privileged matrix available only at training time.
struct Dataset {
  Eigen::MatrixXd features;                 // l x d
  Eigen::VectorXi labels;                   // l
  std::optional<Eigen::MatrixXd> privileged;  // l x d*
  std::vector<std::string> feature_names;

  Eigen::Index num_samples() const { return features.rows(); }
  Eigen::Index num_features() const { return features.cols(); }

  /// Throws DataError if row counts disagree or non-finite entries remain.
  void validate() const;
};

/// Per-class view of a binary dataset. Row i of A_star is the privileged
/// vector of row i of A (same sample).
struct ClassPartition {
  Eigen::MatrixXd A;       // m1 x d, label +1
  Eigen::MatrixXd B;       // m2 x d, label -1
  Eigen::MatrixXd A_star;  // m1 x d* (empty if no privileged info)
  Eigen::MatrixXd B_star;  // m2 x d*
  std::vector<Eigen::Index> index_A;  // rows of the source Dataset
  std::vector<Eigen::Index> index_B;

  Eigen::Index m1() const { return A.rows(); }
  Eigen::Index m2() const { return B.rows(); }
  bool has_privileged() const { return A_star.cols() > 0; }
};

struct Hyperparams {
  double c1 = 1.0;
  double c2 = 1.0;
  double gamma = 1.0;  // privileged-space regularization
  double tau = 0.5;    // pinball parameter; > 0 on the dual path
  KernelSpec kernel{};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Column-wise standardization parameters, applied as (x - mean) / scale.
/// Zero-variance columns get scale 1 (centered only).
struct Scaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

enum class DataFormat { csv, sparse_index };

/// Loads a dataset. CSV: last column is the label, optional header row.
/// Sparse-index: `label idx:val idx:val ...` with 1-based indices.
/// Missing CSV cells (empty fields) are imputed with the column mean.
Dataset load_dataset(const std::string& path, DataFormat format = DataFormat::csv);

/// Moves the trailing `count` feature columns into Dataset::privileged.
Dataset split_privileged_columns(const Dataset& ds, Eigen::Index count);

/// Splits a binary dataset into class matrices. Throws DataError when a class
/// is empty or labels are not in {+1, -1}.
ClassPartition partition_by_class(const Dataset& ds);

/// Standardizes feature columns to mean 0 / unit (population) std deviation.
std::pair<Dataset, Scaler> standardize(const Dataset& ds);

}  // namespace pintw

#endif  // PINTW_DATASET_HPP_
