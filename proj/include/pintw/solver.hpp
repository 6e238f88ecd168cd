#ifndef PINTW_SOLVER_HPP_
#define PINTW_SOLVER_HPP_

#include <optional>

#include "pintw/qp.hpp"

namespace pintw {

/// Closed-form feasible start for a dual carrying a PinBlockLayout:
/// a2 = a3 = 0, a4 = c*tau, a1 = (m2 c tau / m1) * 1. Falls back to a
/// phase-1 solve when the layout is absent.
Eigen::VectorXd initial_feasible_point(const GeneralQP& qp);

/// Dense active-set solver on the nonnegativity bounds; equality constraints
/// are handled through the reduced KKT system. Ground-truth oracle for tests
/// and the direct solver for small problems.
DualSolution solve_dense_oracle(const GeneralQP& qp, double tol = 1e-8,
                                std::optional<Eigen::VectorXd> x0 = std::nullopt);

/// SMO-style working-set decomposition. Each step picks the most
/// KKT-violating variables (round-robin over the layout blocks for coverage)
/// and solves the induced subproblem exactly. Dispatches to the dense oracle
/// below cfg.oracle_threshold.
DualSolution solve_decomposition(const GeneralQP& qp, const SolverConfig& cfg);

}  // namespace pintw

#endif  // PINTW_SOLVER_HPP_
