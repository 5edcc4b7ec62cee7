#include "veritest/mechanisms.hpp"

#include "veritest/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace veritest {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

VectorXd uniform_grid(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("grid_n must be positive");
  if (n == 1) return VectorXd::Constant(1, lo);
  VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  g[n - 1] = hi;
  return g;
}

// Composite trapezoid of tabulated values against the density.
double expectation(const VectorXd& grid, const VectorXd& values, const TypeDistribution& dist) {
  double total = 0.0;
  for (Index i = 0; i + 1 < grid.size(); ++i) {
    const double a = values[i] * dist.pdf(grid[i]);
    const double b = values[i + 1] * dist.pdf(grid[i + 1]);
    total += 0.5 * (a + b) * (grid[i + 1] - grid[i]);
  }
  return total;
}

// U(theta_i) = int_lo^theta_i Lambda(z|theta_i) q(z) dz for an arbitrary
// evaluable allocation, computed cell by cell so that every exponent stays
// nonpositive.
VectorXd envelope_on_grid(const VectorXd& grid, const PrecisionKernel& kernel,
                          const std::function<double(double)>& q,
                          const std::vector<double>& splits) {
  const Index n = grid.size();
  VectorXd U = VectorXd::Zero(n);
  double c_prev = kernel.cum_plus(grid[0]);
  for (Index i = 0; i + 1 < n; ++i) {
    const double c_next = kernel.cum_plus(grid[i + 1]);
    const double cell = integrate(
        [&](double z) { return std::exp(kernel.cum_plus(z) - c_next) * q(z); }, grid[i],
        grid[i + 1], 1e-12, splits);
    U[i + 1] = std::exp(-(c_next - c_prev)) * U[i] + cell;
    c_prev = c_next;
  }
  return U;
}

// Monotonicity of the virtual value on the grid; tolerance absorbs
// quadrature noise.
bool weakly_increasing(const VectorXd& v, double tol = 1e-8) {
  for (Index i = 0; i + 1 < v.size(); ++i) {
    if (v[i + 1] < v[i] - tol) return false;
  }
  return true;
}

double phi_root(const TypeDistribution& dist, const PrecisionKernel& kernel) {
  return bisect_increasing([&](double x) { return virtual_value(dist, kernel, x); }, dist.lo,
                           dist.hi, 1e-10);
}

// Global-upper-bound diagnostic against the exponential authentication rate
// implied by the kernel (alpha = Lambda), with the solved allocation.
double upper_bound_margin(const TypeDistribution& dist, const PrecisionKernel& kernel,
                          const std::function<double(double)>& qstar) {
  const ContinuousAuthRate a = ContinuousAuthRate::exponential(kernel);
  const BoundsReport r = check_bounds(dist, a, kernel, qstar, 21);
  return r.max_upper_violation.value_or(0.0);
}

std::function<double(double)> pl_interp(const VectorXd& grid, const VectorXd& values) {
  return [grid, values](double x) {
    if (x <= grid[0]) return values[0];
    const Index n = grid.size();
    if (x >= grid[n - 1]) return values[n - 1];
    const double step = (grid[n - 1] - grid[0]) / static_cast<double>(n - 1);
    Index i = std::min(static_cast<Index>((x - grid[0]) / step), n - 2);
    while (x < grid[i]) --i;
    while (x > grid[i + 1]) ++i;
    const double frac = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return values[i] + frac * (values[i + 1] - values[i]);
  };
}

}  // namespace

CostFunction CostFunction::power(double a, double b) {
  if (!(a > 0.0) || !(b > 1.0)) throw std::invalid_argument("CostFunction::power: need a>0, b>1");
  CostFunction cf;
  cf.c = [a, b](double q) { return a * std::pow(q, b); };
  cf.cprime = [a, b](double q) { return a * b * std::pow(q, b - 1.0); };
  cf.cprime_inverse = [a, b](double y) { return std::pow(y / (a * b), 1.0 / (b - 1.0)); };
  return cf;
}

double CostFunction::inverse_marginal(double y) const {
  if (y <= 0.0) return 0.0;
  if (cprime_inverse) return cprime_inverse(y);
  double hi = 1.0;
  while (cprime(hi) < y) {
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("inverse_marginal: bracket expansion failed");
  }
  return bisect_increasing([&](double q) { return cprime(q) - y; }, 0.0, hi, 1e-12);
}

void CostFunction::validate(int grid_n) const {
  if (std::abs(c(0.0)) > 1e-12 || std::abs(cprime(0.0)) > 1e-12) {
    throw std::invalid_argument("CostFunction: c(0) and c'(0) must be 0");
  }
  double prev = cprime(0.0);
  for (int i = 1; i < grid_n; ++i) {
    const double q = static_cast<double>(i) / 10.0;
    const double cur = cprime(q);
    if (!(cur > prev)) throw std::invalid_argument("CostFunction: c' must be strictly increasing");
    prev = cur;
  }
}

SolvedMechanism solve_nonlinear_pricing(const TypeDistribution& dist,
                                        const PrecisionKernel& kernel,
                                        const CostFunction& cost, int grid_n) {
  SolvedMechanism m;
  m.grid = uniform_grid(dist.lo, dist.hi, grid_n);
  const Index n = m.grid.size();
  m.phi.resize(n);
  m.phi_myerson.resize(n);
  for (Index i = 0; i < n; ++i) {
    m.phi[i] = virtual_value(dist, kernel, m.grid[i]);
    m.phi_myerson[i] = myerson_virtual_value(dist, m.grid[i]);
  }
  m.phi_monotone = weakly_increasing(m.phi);
  if (!m.phi_monotone) {
    throw std::invalid_argument("solve_nonlinear_pricing: non-monotone virtual value; "
                                "ironing required, out of scope");
  }
  m.theta_star = phi_root(dist, kernel);

  const auto qfun = [&](double z) {
    // Tight quadrature: these values sit inside another quadrature.
    return cost.inverse_marginal(virtual_value(dist, kernel, z, 1e-12));
  };
  m.q.resize(n);
  for (Index i = 0; i < n; ++i) m.q[i] = qfun(m.grid[i]);
  if (n == 1) {
    m.U = VectorXd::Zero(1);
  } else {
    m.U = envelope_on_grid(m.grid, kernel, qfun, {m.theta_star});
  }
  m.t = m.grid.cwiseProduct(m.q) - m.U;

  VectorXd profit(n);
  for (Index i = 0; i < n; ++i) profit[i] = m.t[i] - cost.c(m.q[i]);
  m.revenue = expectation(m.grid, profit, dist);
  m.upper_bound_margin = upper_bound_margin(dist, kernel, pl_interp(m.grid, m.q));
  m.warning = m.upper_bound_margin > 1e-8;
  return m;
}

SolvedMechanism solve_single_good(const TypeDistribution& dist, const PrecisionKernel& kernel,
                                  int grid_n) {
  SolvedMechanism m;
  m.grid = uniform_grid(dist.lo, dist.hi, grid_n);
  const Index n = m.grid.size();
  m.phi.resize(n);
  m.phi_myerson.resize(n);
  for (Index i = 0; i < n; ++i) {
    m.phi[i] = virtual_value(dist, kernel, m.grid[i]);
    m.phi_myerson[i] = myerson_virtual_value(dist, m.grid[i]);
  }
  m.phi_monotone = weakly_increasing(m.phi);
  if (!m.phi_monotone) {
    throw std::invalid_argument("solve_single_good: non-monotone virtual value; "
                                "ironing required, out of scope");
  }
  m.theta_star = phi_root(dist, kernel);

  const double ts = m.theta_star;
  const auto qfun = [ts](double z) { return z >= ts ? 1.0 : 0.0; };
  m.q.resize(n);
  for (Index i = 0; i < n; ++i) m.q[i] = qfun(m.grid[i]);
  if (n == 1) {
    m.U = VectorXd::Zero(1);
  } else {
    m.U = envelope_on_grid(m.grid, kernel, qfun, {ts});
  }
  m.t = m.grid.cwiseProduct(m.q) - m.U;

  // The posted price must rise weakly in the report and never exceed it.
  for (Index i = 0; i + 1 < n; ++i) {
    if (m.q[i] > 0.0 && m.t[i + 1] < m.t[i] - 1e-9) {
      throw std::runtime_error("solve_single_good: transfer not increasing");
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (m.t[i] > m.grid[i] + 1e-9) {
      throw std::runtime_error("solve_single_good: transfer exceeds the report");
    }
  }
  m.revenue = expectation(m.grid, m.t, dist);
  m.upper_bound_margin = upper_bound_margin(dist, kernel, qfun);
  m.warning = m.upper_bound_margin > 1e-8;
  return m;
}

int AuctionSolution::winner(const std::vector<double>& phis) const {
  int best = -1;
  double best_phi = 0.0;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    if (phis[i] > 0.0 && (best < 0 || phis[i] > best_phi)) {
      best = static_cast<int>(i);
      best_phi = phis[i];
    }
  }
  return best;
}

AuctionSolution solve_auction(const std::vector<TypeDistribution>& dists,
                              const std::vector<PrecisionKernel>& kernels, int grid_n) {
  const std::size_t na = dists.size();
  if (na == 0 || kernels.size() != na) {
    throw std::invalid_argument("solve_auction: agent count mismatch");
  }
  AuctionSolution sol;
  sol.grids.resize(na);
  sol.phi.resize(na);
  sol.Q.resize(na);
  sol.price.resize(na);
  sol.reserve.resize(na);

  for (std::size_t i = 0; i < na; ++i) {
    sol.grids[i] = uniform_grid(dists[i].lo, dists[i].hi, grid_n);
    const Index n = sol.grids[i].size();
    sol.phi[i].resize(n);
    for (Index k = 0; k < n; ++k) {
      sol.phi[i][k] = virtual_value(dists[i], kernels[i], sol.grids[i][k]);
    }
    if (!weakly_increasing(sol.phi[i])) {
      throw std::invalid_argument("solve_auction: non-monotone virtual value; "
                                  "ironing required, out of scope");
    }
    sol.reserve[i] = phi_root(dists[i], kernels[i]);
  }

  // Interim winning probability: all rivals' virtual values below one's own.
  for (std::size_t i = 0; i < na; ++i) {
    const Index n = sol.grids[i].size();
    sol.Q[i] = VectorXd::Zero(n);
    for (Index k = 0; k < n; ++k) {
      const double v = sol.phi[i][k];
      if (v <= 0.0) continue;
      double prob = 1.0;
      for (std::size_t j = 0; j < na; ++j) {
        if (j == i) continue;
        const double cut = bisect_increasing(
            [&](double x) { return virtual_value(dists[j], kernels[j], x) - v; }, dists[j].lo,
            dists[j].hi, 1e-10);
        prob *= dists[j].cdf(cut);
      }
      sol.Q[i][k] = prob;
    }
  }

  // Payment conditional on winning, plus expected revenue.
  double revenue = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    const Index n = sol.grids[i].size();
    const auto qi = pl_interp(sol.grids[i], sol.Q[i]);
    const VectorXd rent = envelope_on_grid(sol.grids[i], kernels[i], qi, {sol.reserve[i]});
    sol.price[i] = VectorXd::Zero(n);
    VectorXd interim_payment = VectorXd::Zero(n);
    for (Index k = 0; k < n; ++k) {
      if (sol.Q[i][k] > 0.0) {
        sol.price[i][k] = sol.grids[i][k] - rent[k] / sol.Q[i][k];
        interim_payment[k] = sol.Q[i][k] * sol.price[i][k];
      }
    }
    revenue += expectation(sol.grids[i], interim_payment, dists[i]);
  }
  sol.revenue = revenue;
  return sol;
}

Eigen::VectorXd utility_envelope(const Eigen::VectorXd& grid, const Eigen::VectorXd& q,
                                 const PrecisionKernel& kernel) {
  if (grid.size() != q.size()) throw std::invalid_argument("utility_envelope: size mismatch");
  if ((q.array() < 0.0).any()) throw std::invalid_argument("utility_envelope: q must be >= 0");
  if (grid.size() == 1) return VectorXd::Zero(1);
  return envelope_on_grid(grid, kernel, pl_interp(grid, q), {});
}

}  // namespace veritest
