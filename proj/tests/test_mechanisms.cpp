#include "veritest/mechanisms.hpp"

#include <doctest.h>

#include <cmath>

using namespace veritest;

namespace {
const TypeDistribution kUniform = TypeDistribution::uniform(0, 1);
}

TEST_CASE("cost function power preset") {
  const CostFunction c = CostFunction::power(0.5, 2.0);  // q^2 / 2
  c.validate();
  CHECK(c.c(2.0) == doctest::Approx(2.0));
  CHECK(c.cprime(2.0) == doctest::Approx(2.0));
  CHECK(c.inverse_marginal(3.0) == doctest::Approx(3.0));
  CHECK(c.inverse_marginal(-1.0) == doctest::Approx(0.0));
}

TEST_CASE("pricing without verification reproduces the classical screen") {
  // Uniform types, c(q) = q^2/2: allocation q(theta) = max(2 theta - 1, 0),
  // revenue 1/12.
  const auto kernel = PrecisionKernel::constant(0.0, 0, 1);
  const auto m = solve_nonlinear_pricing(kUniform, kernel, CostFunction::power(0.5, 2.0), 201);
  for (Eigen::Index i = 0; i < m.grid.size(); ++i) {
    const double expect = std::max(2.0 * m.grid[i] - 1.0, 0.0);
    CHECK(std::abs(m.q[i] - expect) < 1e-8);
  }
  CHECK(std::abs(m.revenue - 1.0 / 12.0) < 1e-4);
  CHECK(m.theta_star == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(m.phi_monotone);
  CHECK_FALSE(m.warning);
}

TEST_CASE("posted price without verification") {
  const auto kernel = PrecisionKernel::constant(0.0, 0, 1);
  const auto m = solve_single_good(kUniform, kernel, 201);
  CHECK(m.theta_star == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(m.revenue - 0.25) < 2e-3);
  // Buyers above the threshold pay the threshold price.
  for (Eigen::Index i = 0; i < m.grid.size(); ++i) {
    if (m.grid[i] > m.theta_star + 1e-9) {
      CHECK(m.q[i] == doctest::Approx(1.0));
      CHECK(m.t[i] == doctest::Approx(0.5).epsilon(1e-6));
    } else if (m.grid[i] < m.theta_star - 1e-9) {
      CHECK(m.q[i] == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("verification lowers the exclusion threshold and raises revenue") {
  const auto m0 = solve_single_good(kUniform, PrecisionKernel::constant(0.0, 0, 1), 201);
  const auto m1 = solve_single_good(kUniform, PrecisionKernel::constant(1.0, 0, 1), 201);
  CHECK(m1.theta_star < m0.theta_star);
  CHECK(m1.revenue > m0.revenue);
  // Transfers increase with the type and never exceed it.
  for (Eigen::Index i = 1; i < m1.grid.size(); ++i) {
    CHECK(m1.t[i] >= m1.t[i - 1] - 1e-9);
    CHECK(m1.t[i] <= m1.grid[i] + 1e-9);
  }
}

TEST_CASE("extreme precision approaches full surplus extraction") {
  const auto m = solve_single_good(kUniform, PrecisionKernel::constant(1e6, 0, 1), 201);
  CHECK(m.theta_star < 1e-3);
  CHECK(std::abs(m.revenue - 0.5) < 5e-3);
  CHECK(std::isfinite(m.U.maxCoeff()));
  CHECK(m.U.maxCoeff() < 1e-3);
}

TEST_CASE("utility envelope matches the incremental solver") {
  // Smooth allocation: the interpolation error of the standalone envelope is
  // quadratic in the grid step.
  const auto kernel = PrecisionKernel::constant(1.0, 0, 1);
  const auto m = solve_nonlinear_pricing(kUniform, kernel, CostFunction::power(0.5, 2.0), 201);
  const Eigen::VectorXd U = utility_envelope(m.grid, m.q, kernel);
  CHECK((U - m.U).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("symmetric auction without verification matches the classical oracle") {
  const auto kernel = PrecisionKernel::constant(0.0, 0, 1);
  const auto sol = solve_auction({kUniform, kUniform}, {kernel, kernel}, 101);
  CHECK(std::abs(sol.revenue - 5.0 / 12.0) < 5e-3);
  CHECK(sol.reserve[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.winner({0.3, 0.2}) == 0);
  CHECK(sol.winner({0.1, 0.4}) == 1);
  CHECK(sol.winner({-0.2, -0.1}) == -1);
  CHECK(sol.winner({0.3, 0.3}) == 0);  // ties to the lowest index
}

TEST_CASE("non-monotone virtual value is rejected") {
  // A sharply bimodal tabulated density makes the classical virtual value
  // non-monotone; the solver refuses rather than ironing.
  std::vector<double> density;
  for (int i = 0; i <= 60; ++i) {
    const double th = i / 60.0;
    density.push_back(0.05 + std::exp(-200.0 * (th - 0.25) * (th - 0.25)) +
                      5.0 * std::exp(-200.0 * (th - 0.75) * (th - 0.75)));
  }
  const auto dist = TypeDistribution::tabulated(0, 1, density);
  const auto kernel = PrecisionKernel::constant(0.0, 0, 1);
  CHECK_THROWS_AS(solve_nonlinear_pricing(dist, kernel, CostFunction::power(0.5, 2.0), 101),
                  std::invalid_argument);
}
