#include "veritest/small_lp.hpp"

#include "veritest/finite_markov.hpp"

#include <doctest.h>

using namespace veritest;

TEST_CASE("two-variable maximization via negated costs") {
  // min -x - y  s.t.  x + 2y <= 4, 3x + y <= 6, x,y >= 0. Optimum (1.6, 1.2).
  LinearProgram lp;
  lp.c = (Vec(2) << -1.0, -1.0).finished();
  lp.A_le = (Mat(2, 2) << 1.0, 2.0, 3.0, 1.0).finished();
  lp.b_le = (Vec(2) << 4.0, 6.0).finished();
  const auto sol = solve_lp(lp);
  REQUIRE(sol.has_value());
  CHECK(sol->x[0] == doctest::Approx(1.6));
  CHECK(sol->x[1] == doctest::Approx(1.2));
  CHECK(sol->objective == doctest::Approx(-2.8));
}

TEST_CASE("equality constraints") {
  // min x + y  s.t.  x + y = 1, x - y <= 0.2.
  LinearProgram lp;
  lp.c = (Vec(2) << 1.0, 2.0).finished();
  lp.A_eq = (Mat(1, 2) << 1.0, 1.0).finished();
  lp.b_eq = (Vec(1) << 1.0).finished();
  lp.A_le = (Mat(1, 2) << 1.0, -1.0).finished();
  lp.b_le = (Vec(1) << 0.2).finished();
  const auto sol = solve_lp(lp);
  REQUIRE(sol.has_value());
  CHECK(sol->x[0] == doctest::Approx(0.6));
  CHECK(sol->x[1] == doctest::Approx(0.4));
  CHECK(sol->objective == doctest::Approx(1.4));
}

TEST_CASE("infeasible program is detected") {
  LinearProgram lp;
  lp.c = (Vec(1) << 1.0).finished();
  lp.A_eq = (Mat(1, 1) << 1.0).finished();
  lp.b_eq = (Vec(1) << 2.0).finished();
  lp.A_le = (Mat(1, 1) << 1.0).finished();
  lp.b_le = (Vec(1) << 1.0).finished();
  CHECK_FALSE(solve_lp(lp).has_value());
}

TEST_CASE("feasibility-only interface") {
  LinearProgram lp;
  lp.c = Vec::Zero(2);
  lp.A_eq = (Mat(1, 2) << 1.0, 1.0).finished();
  lp.b_eq = (Vec(1) << 1.0).finished();
  const auto sol = solve_feasible(lp);
  REQUIRE(sol.has_value());
  CHECK(sol->sum() == doctest::Approx(1.0));
}

TEST_CASE("degenerate program with redundant equalities") {
  LinearProgram lp;
  lp.c = (Vec(2) << 1.0, 0.0).finished();
  lp.A_eq = (Mat(2, 2) << 1.0, 1.0, 2.0, 2.0).finished();
  lp.b_eq = (Vec(2) << 1.0, 2.0).finished();
  const auto sol = solve_lp(lp);
  REQUIRE(sol.has_value());
  CHECK(sol->objective == doctest::Approx(0.0));
}
