// Revenue-maximizing mechanisms under probabilistic verification: nonlinear
// pricing, sale of a single good, and multi-agent auctions, on uniform type
// grids with quadrature-based transfers.
#pragma once

#include "veritest/continuous_model.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace veritest {

struct CostFunction {
  std::function<double(double)> c;       // c(0) = 0
  std::function<double(double)> cprime;  // strictly increasing, unbounded, c'(0)=0
  std::function<double(double)> cprime_inverse;  // optional; root-found if absent

  static CostFunction power(double a, double b);  // c(q) = a * q^b, b > 1
  double inverse_marginal(double y) const;        // (c')^{-1}(max(y,0))
  void validate(int grid_n = 101) const;
};

struct SolvedMechanism {
  Eigen::VectorXd grid;         // type grid
  Eigen::VectorXd q, t, U;      // allocation, transfer, equilibrium utility
  Eigen::VectorXd phi, phi_myerson;
  double revenue = 0.0;
  double theta_star = 0.0;      // exclusion threshold (single good; pricing: phi = 0)
  bool phi_monotone = true;
  double upper_bound_margin = 0.0;  // max violation of the global upper bound
  bool warning = false;             // upper bound violated: candidate only
};

SolvedMechanism solve_nonlinear_pricing(const TypeDistribution& dist,
                                        const PrecisionKernel& kernel,
                                        const CostFunction& cost, int grid_n);

SolvedMechanism solve_single_good(const TypeDistribution& dist, const PrecisionKernel& kernel,
                                  int grid_n);

struct AuctionSolution {
  std::vector<Eigen::VectorXd> grids;   // per-agent type grids
  std::vector<Eigen::VectorXd> phi;     // per-agent virtual values on the grid
  std::vector<Eigen::VectorXd> Q;       // interim winning probabilities
  std::vector<Eigen::VectorXd> price;   // payment conditional on winning
  std::vector<double> reserve;          // phi_i^{-1}(0)
  double revenue = 0.0;
  // Winner at a pure type profile: argmax of positive virtual values, ties to
  // the lowest index; -1 when no virtual value is positive.
  int winner(const std::vector<double>& phis) const;
};

AuctionSolution solve_auction(const std::vector<TypeDistribution>& dists,
                              const std::vector<PrecisionKernel>& kernels, int grid_n);

// U(theta) = int_lo^theta Lambda(z|theta) q(z) dz for a tabulated allocation
// (piecewise-linear interpolation between grid points).
Eigen::VectorXd utility_envelope(const Eigen::VectorXd& grid, const Eigen::VectorXd& q,
                                 const PrecisionKernel& kernel);

}  // namespace veritest
