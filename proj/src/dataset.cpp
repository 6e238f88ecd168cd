#include "pintw/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace pintw {
namespace {

bool parse_double(const std::string& token, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(token, &pos);
    while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
    return pos == token.size();
  } catch (const std::exception&) {
    return false;
  }
}

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string token;
  while (std::getline(ss, token, sep)) out.push_back(trim(token));
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

int to_label(double v, int line_no) {
  double rounded = std::round(v);
  if (std::abs(v - rounded) > 1e-9) {
    throw DataError("line " + std::to_string(line_no) + ": label '" +
                    std::to_string(v) + "' is not an integer");
  }
  return static_cast<int>(rounded);
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);

  std::vector<std::vector<double>> rows;   // NaN marks a missing cell
  std::vector<int> labels;
  std::vector<std::string> names;
  std::string line;
  int line_no = 0;
  Eigen::Index ncols = -1;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto tokens = split(line, ',');

    // Optional header: first row whose non-label cells are not all numeric.
    if (rows.empty() && names.empty() && ncols < 0) {
      bool numeric = true;
      for (const auto& t : tokens) {
        double v;
        if (!t.empty() && !parse_double(t, v)) { numeric = false; break; }
      }
      if (!numeric) {
        names.assign(tokens.begin(), tokens.end() - 1);
        ncols = static_cast<Eigen::Index>(tokens.size());
        continue;
      }
    }

    if (ncols < 0) ncols = static_cast<Eigen::Index>(tokens.size());
    if (static_cast<Eigen::Index>(tokens.size()) != ncols) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(ncols) + " columns, got " +
                      std::to_string(tokens.size()));
    }
    if (ncols < 2) {
      throw DataError("line " + std::to_string(line_no) +
                      ": need at least one feature column and a label");
    }

    std::vector<double> row(ncols - 1);
    for (Eigen::Index j = 0; j + 1 < ncols; ++j) {
      const std::string& t = tokens[j];
      if (t.empty()) {
        row[j] = std::numeric_limits<double>::quiet_NaN();  // impute later
        continue;
      }
      double v;
      if (!parse_double(t, v)) {
        throw DataError("line " + std::to_string(line_no) +
                        ": non-numeric feature token '" + t + "'");
      }
      row[j] = v;
    }
    const std::string& lt = tokens[ncols - 1];
    double lv;
    if (lt.empty() || !parse_double(lt, lv)) {
      throw DataError("line " + std::to_string(line_no) + ": bad label token '" + lt + "'");
    }
    labels.push_back(to_label(lv, line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("file has no data rows: " + path);

  const Eigen::Index l = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = ncols - 1;
  Dataset ds;
  ds.features.resize(l, d);
  ds.labels.resize(l);
  for (Eigen::Index i = 0; i < l; ++i) {
    ds.labels[i] = labels[i];
    for (Eigen::Index j = 0; j < d; ++j) ds.features(i, j) = rows[i][j];
  }
  ds.feature_names = std::move(names);

  // Column-mean imputation of missing cells.
  for (Eigen::Index j = 0; j < d; ++j) {
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < l; ++i) {
      if (!std::isnan(ds.features(i, j))) { sum += ds.features(i, j); ++count; }
    }
    if (count == 0) throw DataError("column " + std::to_string(j + 1) + " has no values");
    const double mean = sum / static_cast<double>(count);
    for (Eigen::Index i = 0; i < l; ++i) {
      if (std::isnan(ds.features(i, j))) ds.features(i, j) = mean;
    }
  }
  ds.validate();
  return ds;
}

Dataset load_sparse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);

  std::vector<std::vector<std::pair<Eigen::Index, double>>> rows;
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  Eigen::Index max_idx = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;
    double lv;
    if (!parse_double(token, lv)) {
      throw DataError("line " + std::to_string(line_no) + ": bad label token '" + token + "'");
    }
    labels.push_back(to_label(lv, line_no));
    std::vector<std::pair<Eigen::Index, double>> entries;
    while (ss >> token) {
      auto colon = token.find(':');
      if (colon == std::string::npos) {
        throw DataError("line " + std::to_string(line_no) +
                        ": expected idx:val, got '" + token + "'");
      }
      double idx_d, val;
      if (!parse_double(token.substr(0, colon), idx_d) ||
          !parse_double(token.substr(colon + 1), val)) {
        throw DataError("line " + std::to_string(line_no) + ": bad entry '" + token + "'");
      }
      auto idx = static_cast<Eigen::Index>(idx_d);
      if (idx < 1 || idx_d != static_cast<double>(idx)) {
        throw DataError("line " + std::to_string(line_no) +
                        ": indices are 1-based integers, got '" + token + "'");
      }
      max_idx = std::max(max_idx, idx);
      entries.emplace_back(idx - 1, val);
    }
    rows.push_back(std::move(entries));
  }
  if (rows.empty()) throw DataError("file has no data rows: " + path);

  Dataset ds;
  ds.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), max_idx);
  ds.labels.resize(static_cast<Eigen::Index>(labels.size()));
  for (Eigen::Index i = 0; i < ds.labels.size(); ++i) {
    ds.labels[i] = labels[i];
    for (const auto& [j, v] : rows[i]) ds.features(i, j) = v;
  }
  ds.validate();
  return ds;
}

}  // namespace

void Dataset::validate() const {
  if (features.rows() != labels.size()) {
    throw DataError("feature rows (" + std::to_string(features.rows()) +
                    ") do not match label count (" + std::to_string(labels.size()) + ")");
  }
  if (privileged && privileged->rows() != features.rows()) {
    throw DataError("privileged rows (" + std::to_string(privileged->rows()) +
                    ") do not match sample count (" + std::to_string(features.rows()) + ")");
  }
  if (!features.allFinite() || (privileged && !privileged->allFinite())) {
    throw DataError("dataset contains non-finite entries after loading");
  }
}

void Hyperparams::validate() const {
  if (c1 <= 0 || c2 <= 0) throw DataError("c1 and c2 must be positive");
  if (gamma <= 0) throw DataError("gamma must be positive");
  if (tau < 0 || tau > 1) throw DataError("tau must lie in [0, 1]");
  if (kernel.kind == KernelKind::rbf && kernel.sigma <= 0) {
    throw DataError("rbf sigma must be positive");
  }
}

Eigen::MatrixXd Scaler::apply(const Eigen::MatrixXd& X) const {
  if (X.cols() != mean.size()) {
    throw DataError("scaler dimension " + std::to_string(mean.size()) +
                    " does not match data dimension " + std::to_string(X.cols()));
  }
  return (X.rowwise() - mean.transpose()).array().rowwise() /
         scale.transpose().array();
}

Eigen::VectorXd Scaler::apply(const Eigen::VectorXd& x) const {
  if (x.size() != mean.size()) {
    throw DataError("scaler dimension mismatch");
  }
  return (x - mean).array() / scale.array();
}

Dataset load_dataset(const std::string& path, DataFormat format) {
  return format == DataFormat::csv ? load_csv(path) : load_sparse(path);
}

Dataset split_privileged_columns(const Dataset& ds, Eigen::Index count) {
  if (count <= 0 || count >= ds.num_features()) {
    throw DataError("privileged column count must be in [1, d-1]");
  }
  Dataset out;
  const Eigen::Index d = ds.num_features() - count;
  out.features = ds.features.leftCols(d);
  out.privileged = ds.features.rightCols(count);
  out.labels = ds.labels;
  if (!ds.feature_names.empty()) {
    out.feature_names.assign(ds.feature_names.begin(), ds.feature_names.begin() + d);
  }
  return out;
}

ClassPartition partition_by_class(const Dataset& ds) {
  ClassPartition part;
  for (Eigen::Index i = 0; i < ds.num_samples(); ++i) {
    if (ds.labels[i] == 1) {
      part.index_A.push_back(i);
    } else if (ds.labels[i] == -1) {
      part.index_B.push_back(i);
    } else {
      throw DataError("binary partition requires labels in {+1, -1}; row " +
                      std::to_string(i) + " has label " + std::to_string(ds.labels[i]));
    }
  }
  if (part.index_A.empty() || part.index_B.empty()) {
    throw DataError("degenerate dataset: a class has zero members");
  }
  const Eigen::Index d = ds.num_features();
  const Eigen::Index ds_star = ds.privileged ? ds.privileged->cols() : 0;
  part.A.resize(static_cast<Eigen::Index>(part.index_A.size()), d);
  part.B.resize(static_cast<Eigen::Index>(part.index_B.size()), d);
  part.A_star.resize(part.A.rows(), ds_star);
  part.B_star.resize(part.B.rows(), ds_star);
  for (Eigen::Index i = 0; i < part.A.rows(); ++i) {
    part.A.row(i) = ds.features.row(part.index_A[i]);
    if (ds_star > 0) part.A_star.row(i) = ds.privileged->row(part.index_A[i]);
  }
  for (Eigen::Index i = 0; i < part.B.rows(); ++i) {
    part.B.row(i) = ds.features.row(part.index_B[i]);
    if (ds_star > 0) part.B_star.row(i) = ds.privileged->row(part.index_B[i]);
  }
  return part;
}

std::pair<Dataset, Scaler> standardize(const Dataset& ds) {
  if (ds.num_samples() < 2) throw DataError("standardize needs at least 2 samples");
  Scaler scaler;
  scaler.mean = ds.features.colwise().mean();
  Eigen::MatrixXd centered = ds.features.rowwise() - scaler.mean.transpose();
  // Population standard deviation; zero-variance columns keep scale 1.
  Eigen::VectorXd var = centered.array().square().colwise().mean();
  scaler.scale = var.array().sqrt();
  for (Eigen::Index j = 0; j < scaler.scale.size(); ++j) {
    if (scaler.scale[j] < 1e-300) scaler.scale[j] = 1.0;
  }
  Dataset out = ds;
  out.features = centered.array().rowwise() / scaler.scale.transpose().array();
  return {std::move(out), std::move(scaler)};
}

}  // namespace pintw
