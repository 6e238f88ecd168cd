#include "pintw/synthetic.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace pintw {

Dataset make_blobs(Eigen::Index n, Eigen::Index dim, double separation,
                   std::uint64_t seed) {
  if (n < 2 || dim < 1) throw DataError("make_blobs needs n >= 2 and dim >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset ds;
  ds.features.resize(n, dim);
  ds.labels.resize(n);
  const double half = separation / 2.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = i < n / 2 ? 1 : -1;
    ds.labels[i] = y;
    for (Eigen::Index j = 0; j < dim; ++j) ds.features(i, j) = gauss(rng);
    ds.features(i, 0) += y > 0 ? half : -half;
  }
  return ds;
}

Dataset flip_labels(const Dataset& ds, double fraction, std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw DataError("flip fraction must lie in [0, 1]");
  }
  Dataset out = ds;
  const Eigen::Index l = ds.num_samples();
  const auto flips = static_cast<Eigen::Index>(
      std::llround(fraction * static_cast<double>(l)));

  // Partial Fisher-Yates over the index vector picks `flips` distinct rows.
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(l));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (Eigen::Index i = 0; i < flips; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, l - 1);
    std::swap(idx[i], idx[pick(rng)]);
    out.labels[idx[i]] = -out.labels[idx[i]];
  }
  return out;
}

}  // namespace pintw
