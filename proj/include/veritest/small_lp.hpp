// Small dense linear programming: two-phase primal simplex with Bland's rule.
// Intended for tiny feasibility/optimization problems (tens of variables);
// no sparsity, no scaling, no warm starts.
#pragma once

#include <Eigen/Dense>

#include <optional>

namespace veritest {

struct LinearProgram {
  // min c'x  s.t.  A_eq x = b_eq,  A_le x <= b_le,  x >= 0.
  Eigen::VectorXd c;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_le;
  Eigen::VectorXd b_le;
};

struct LpSolution {
  Eigen::VectorXd x;
  double objective;
};

// Returns nullopt when infeasible. Throws on unbounded objectives.
std::optional<LpSolution> solve_lp(const LinearProgram& lp, double tol = 1e-9);

// Feasibility only (c = 0).
std::optional<Eigen::VectorXd> solve_feasible(const LinearProgram& lp, double tol = 1e-9);

}  // namespace veritest
