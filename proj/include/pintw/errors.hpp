#ifndef PINTW_ERRORS_HPP_
#define PINTW_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pintw {

/// Malformed input data, dimension mismatches, degenerate datasets.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Solver failures: infeasibility, non-convergence, non-PSD objective.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pintw

#endif  // PINTW_ERRORS_HPP_
