#include "veritest/small_lp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace veritest {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Tableau layout: rows = constraints, cols = [structural | slack | artificial | rhs].
// basis[i] is the column basic in row i.
struct Tableau {
  MatrixXd t;
  std::vector<Index> basis;
  Index ncols;  // excluding rhs
};

// Price out the objective row for the given costs and run primal simplex
// with Bland's rule. Returns false when the problem is unbounded.
bool simplex(Tableau& tab, const VectorXd& cost, double tol, double& objective) {
  const Index m = tab.t.rows();
  const Index n = tab.ncols;
  VectorXd reduced = cost;
  for (Index i = 0; i < m; ++i) {
    const double cb = cost[tab.basis[i]];
    if (cb != 0.0) reduced -= cb * tab.t.row(i).head(n).transpose();
  }
  for (int iter = 0; iter < 100000; ++iter) {
    // Bland: smallest index with negative reduced cost.
    Index enter = -1;
    for (Index j = 0; j < n; ++j) {
      if (reduced[j] < -tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      objective = 0.0;
      for (Index i = 0; i < m; ++i) objective += cost[tab.basis[i]] * tab.t(i, n);
      return true;
    }
    // Ratio test, ties by smallest basis index.
    Index leave = -1;
    double best = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double a = tab.t(i, enter);
      if (a > tol) {
        const double ratio = tab.t(i, n) / a;
        if (leave < 0 || ratio < best - tol ||
            (ratio < best + tol && tab.basis[i] < tab.basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
    }
    if (leave < 0) return false;  // unbounded
    // Pivot.
    tab.t.row(leave) /= tab.t(leave, enter);
    for (Index i = 0; i < m; ++i) {
      if (i != leave && std::abs(tab.t(i, enter)) > 0.0) {
        tab.t.row(i) -= tab.t(i, enter) * tab.t.row(leave);
      }
    }
    reduced -= reduced[enter] * tab.t.row(leave).head(n).transpose();
    tab.basis[leave] = enter;
  }
  throw std::runtime_error("simplex: iteration limit");
}

}  // namespace

std::optional<LpSolution> solve_lp(const LinearProgram& lp, double tol) {
  const Index nx = lp.c.size();
  const Index me = lp.b_eq.size();
  const Index ml = lp.b_le.size();
  const Index m = me + ml;
  const Index nslack = ml;
  const Index ncols = nx + nslack + m;  // artificial per row

  Tableau tab;
  tab.t = MatrixXd::Zero(m, ncols + 1);
  tab.ncols = ncols;
  tab.basis.resize(m);

  for (Index i = 0; i < me; ++i) {
    tab.t.row(i).head(nx) = lp.A_eq.row(i);
    tab.t(i, ncols) = lp.b_eq[i];
  }
  for (Index i = 0; i < ml; ++i) {
    tab.t.row(me + i).head(nx) = lp.A_le.row(i);
    tab.t(me + i, nx + i) = 1.0;
    tab.t(me + i, ncols) = lp.b_le[i];
  }
  // Nonnegative right-hand sides.
  for (Index i = 0; i < m; ++i) {
    if (tab.t(i, ncols) < 0.0) tab.t.row(i) = -tab.t.row(i);
  }
  // Artificial basis.
  for (Index i = 0; i < m; ++i) {
    tab.t(i, nx + nslack + i) = 1.0;
    tab.basis[i] = nx + nslack + i;
  }

  // Phase 1: minimize the sum of artificials.
  VectorXd cost1 = VectorXd::Zero(ncols);
  cost1.tail(m).setOnes();
  double phase1 = 0.0;
  if (!simplex(tab, cost1, tol, phase1)) {
    throw std::runtime_error("solve_lp: phase 1 unbounded");
  }
  if (phase1 > 1e-7) return std::nullopt;

  // Drive any residual artificials out of the basis where possible.
  for (Index i = 0; i < m; ++i) {
    if (tab.basis[i] >= nx + nslack) {
      Index enter = -1;
      for (Index j = 0; j < nx + nslack; ++j) {
        if (std::abs(tab.t(i, j)) > tol) {
          enter = j;
          break;
        }
      }
      if (enter >= 0) {
        tab.t.row(i) /= tab.t(i, enter);
        for (Index r = 0; r < m; ++r) {
          if (r != i && std::abs(tab.t(r, enter)) > 0.0) {
            tab.t.row(r) -= tab.t(r, enter) * tab.t.row(i);
          }
        }
        tab.basis[i] = enter;
      }
    }
  }
  // Forbid artificials from re-entering.
  for (Index i = 0; i < m; ++i) {
    tab.t.col(nx + nslack + i).setZero();
    if (tab.basis[i] == nx + nslack + i) tab.t(i, nx + nslack + i) = 1.0;
  }

  // Phase 2.
  VectorXd cost2 = VectorXd::Zero(ncols);
  cost2.head(nx) = lp.c;
  double objective = 0.0;
  if (!simplex(tab, cost2, tol, objective)) {
    throw std::runtime_error("solve_lp: objective unbounded");
  }

  VectorXd x = VectorXd::Zero(nx);
  for (Index i = 0; i < m; ++i) {
    if (tab.basis[i] < nx) x[tab.basis[i]] = tab.t(i, ncols);
  }
  return LpSolution{x, objective};
}

std::optional<Eigen::VectorXd> solve_feasible(const LinearProgram& lp, double tol) {
  LinearProgram fp = lp;
  if (fp.c.size() == 0) fp.c = VectorXd::Zero(fp.A_eq.cols() > 0 ? fp.A_eq.cols() : fp.A_le.cols());
  fp.c.setZero();
  auto sol = solve_lp(fp, tol);
  if (!sol) return std::nullopt;
  return sol->x;
}

}  // namespace veritest
