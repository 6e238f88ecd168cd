#ifndef PINTW_SYNTHETIC_HPP_
#define PINTW_SYNTHETIC_HPP_

#include <cstdint>

#include "pintw/dataset.hpp"

namespace pintw {

/// Two isotropic Gaussian blobs in `dim` dimensions, centers +/- separation/2
/// along the first axis, unit per-axis noise, labels +1/-1, half each.
Dataset make_blobs(Eigen::Index n, Eigen::Index dim, double separation,
                   std::uint64_t seed);

/// Flips the given fraction of labels uniformly at random.
Dataset flip_labels(const Dataset& ds, double fraction, std::uint64_t seed);

}  // namespace pintw

#endif  // PINTW_SYNTHETIC_HPP_
