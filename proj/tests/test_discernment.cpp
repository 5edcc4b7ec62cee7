#include "veritest/discernment.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace veritest;

namespace {

// Three-type binary environment with two tests given by pass-rate rows.
PassageMatrix two_test_env(const std::vector<double>& tau, const std::vector<double>& psi) {
  const auto n = tau.size();
  Mat rates(2, static_cast<Eigen::Index>(n));
  std::vector<std::string> types;
  for (std::size_t j = 0; j < n; ++j) {
    rates(0, static_cast<Eigen::Index>(j)) = tau[j];
    rates(1, static_cast<Eigen::Index>(j)) = psi[j];
    types.push_back("t" + std::to_string(j));
  }
  return PassageMatrix::binary(types, {"tau", "psi"}, rates);
}

PassageMatrix deterministic_env() {
  Mat rates(3, 3);
  rates << 1, 0, 0, 1, 1, 0, 0, 1, 1;
  return PassageMatrix::binary({"theta1", "theta2", "theta3"}, {"tau1", "tau2", "tau3"},
                               rates);
}

// Direct feasibility of a binary conversion (k01, k11): monotone, preserves
// the base type's pass rate, and weakly lowers every other type's.
bool conversion_feasible(const PassageMatrix& env, std::size_t theta, double k01,
                         double k11, double tol = 1e-12) {
  if (k01 < -tol || k01 > 1 + tol || k11 < -tol || k11 > 1 + tol) return false;
  if (k11 < k01 - tol) return false;
  const double ptau = env.pass_rate(0, theta);
  const double ppsi = env.pass_rate(1, theta);
  if (std::abs((1 - ptau) * k01 + ptau * k11 - ppsi) > 1e-9) return false;
  for (std::size_t j = 0; j < env.num_types(); ++j) {
    if (j == theta) continue;
    const double pt = env.pass_rate(0, j);
    if ((1 - pt) * k01 + pt * k11 > env.pass_rate(1, j) + tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("half-line intersection") {
  using C = std::pair<double, double>;
  const auto full = intersect_half_lines({});
  REQUIRE(full.has_value());
  CHECK(full->lo == doctest::Approx(0.0));
  CHECK(full->hi == doctest::Approx(1.0));

  // lambda <= 0.5 and lambda >= 0.25.
  const auto mid = intersect_half_lines({C{2.0, 1.0}, C{-4.0, -1.0}});
  REQUIRE(mid.has_value());
  CHECK(mid->lo == doctest::Approx(0.25));
  CHECK(mid->hi == doctest::Approx(0.5));

  CHECK_FALSE(intersect_half_lines({C{1.0, -0.5}}).has_value());
  CHECK_FALSE(intersect_half_lines({C{0.0, -1.0}}).has_value());
  CHECK(intersect_half_lines({C{0.0, 1.0}}).has_value());
}

TEST_CASE("deterministic-test relation table") {
  const PassageMatrix env = deterministic_env();
  auto holds = [&](std::size_t th, std::size_t a, std::size_t b) {
    return check_discerning(env, th, a, b).holds;
  };
  // Type 1: tau1 > tau2 > tau3.
  CHECK(holds(0, 0, 1));
  CHECK_FALSE(holds(0, 1, 0));
  CHECK(holds(0, 1, 2));
  CHECK_FALSE(holds(0, 2, 1));
  // Type 2: tau2 and tau3 incomparable.
  CHECK_FALSE(holds(1, 1, 2));
  CHECK_FALSE(holds(1, 2, 1));
  // Type 3: tau3 > tau2 ~ tau1.
  CHECK(holds(2, 2, 1));
  CHECK_FALSE(holds(2, 1, 2));
  CHECK(check_equivalent(env, 2, 0, 1));
  CHECK(holds(2, 0, 1));
  CHECK(holds(2, 1, 0));

  CHECK(most_discerning_tests(env, 0) == std::vector<std::size_t>{0});
  CHECK(most_discerning_tests(env, 1).empty());
  CHECK(most_discerning_tests(env, 2) == std::vector<std::size_t>{2});

  const auto f = most_discerning_function(env);
  CHECK_FALSE(f.selection.has_value());
  CHECK(f.failing_types == std::vector<std::size_t>{1});
}

TEST_CASE("reflexivity and witness validity") {
  const PassageMatrix env = two_test_env({0.5, 0.2, 0.8}, {0.5, 0.2, 0.8});
  const auto w = check_discerning(env, 0, 0, 1);
  CHECK(w.holds);
  REQUIRE(w.conversion.has_value());
  CHECK(is_monotone(*w.conversion));
  const Measure converted = push(env.dist(0, 0), *w.conversion);
  CHECK(std::abs(converted.top_mass() - env.pass_rate(1, 0)) < 1e-10);
}

TEST_CASE("tangency instance pins lambda near one half") {
  // Affine vs convex pass rates that touch at the base type: the dominating
  // blend is essentially unique at lambda = 1/2.
  std::vector<double> taus, psis;
  const std::vector<double> grid = {0.5, 0.3, 0.45, 0.55, 0.7};
  for (double th : grid) {
    taus.push_back(0.5 + 1.5 * (th - 0.5));
    psis.push_back(th * (th - 0.25) + 0.375);
  }
  const PassageMatrix env = two_test_env(taus, psis);
  const auto w = check_discerning(env, 0, 0, 1);
  CHECK(w.holds);
  REQUIRE(w.lambda_interval.has_value());
  // Bounds 1/2 +- (2/3) * offset from the nearest grid types at +-0.05.
  CHECK(w.lambda_interval->lo == doctest::Approx(0.5 - 2.0 / 3.0 * 0.05));
  CHECK(w.lambda_interval->hi == doctest::Approx(0.5 + 2.0 / 3.0 * 0.05));
}

TEST_CASE("hard-for-everyone test can dominate an easy one") {
  // Base type 0.5; others at +-0.15, +-0.25.
  std::vector<double> taus, psi2s;
  for (double th : {0.5, 0.35, 0.65, 0.25, 0.75}) {
    const double d2 = (th - 0.5) * (th - 0.5);
    taus.push_back(0.375 - 5.0 * d2);
    psi2s.push_back(0.75 * (0.75 - 4.0 * d2));
  }
  const PassageMatrix env = two_test_env(taus, psi2s);
  const auto w = check_discerning(env, 0, 0, 1);
  CHECK(w.holds);
  REQUIRE(w.lambda_interval.has_value());
  CHECK(w.lambda_interval->lo == doctest::Approx(6.0 / 7.0));
}

TEST_CASE("parametric and linear-feasibility paths agree on random binary data") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> rate(0.05, 0.95);
  std::uniform_int_distribution<int> ntypes(2, 5);
  int holds_count = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = ntypes(rng);
    std::vector<double> tau, psi;
    for (int j = 0; j < n; ++j) {
      tau.push_back(rate(rng));
      psi.push_back(rate(rng));
    }
    const PassageMatrix env = two_test_env(tau, psi);
    for (std::size_t th = 0; th < static_cast<std::size_t>(n); ++th) {
      const auto a = check_discerning(env, th, 0, 1);
      const auto b = check_discerning_lp(env, th, 0, 1);
      CHECK(a.holds == b.holds);
      if (a.holds) {
        ++holds_count;
        REQUIRE(b.conversion.has_value());
        CHECK(is_monotone(*b.conversion));
        const double k01 = b.conversion->matrix()(0, 1);
        const double k11 = b.conversion->matrix()(1, 1);
        CHECK(conversion_feasible(env, th, k01, k11, 1e-7));
      }
    }
  }
  CHECK(holds_count > 20);  // the generator produces both outcomes
}

TEST_CASE("extremal feasibility recovers the lambda range") {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> rate(0.05, 0.95);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> tau, psi;
    for (int j = 0; j < 3; ++j) {
      tau.push_back(rate(rng));
      psi.push_back(rate(rng));
    }
    const PassageMatrix env = two_test_env(tau, psi);
    const auto param = check_discerning(env, 0, 0, 1);
    if (!param.holds || param.degenerate) continue;
    const auto hi = check_discerning_lp(env, 0, 0, 1, +1);
    const auto lo = check_discerning_lp(env, 0, 0, 1, -1);
    REQUIRE(hi.lambda_interval.has_value());
    REQUIRE(lo.lambda_interval.has_value());
    CHECK(std::abs(hi.lambda_interval->hi - param.lambda_interval->hi) < 1e-6);
    CHECK(std::abs(lo.lambda_interval->lo - param.lambda_interval->lo) < 1e-6);
  }
}

TEST_CASE("theta-equivalence criteria") {
  // Equal rows.
  const PassageMatrix eq = two_test_env({0.4, 0.7}, {0.4, 0.7});
  CHECK(check_equivalent(eq, 0, 0, 1));
  // Minimal type on both tests, unequal rows.
  const PassageMatrix min = two_test_env({0.2, 0.9}, {0.1, 0.8});
  CHECK(check_equivalent(min, 0, 0, 1));
  CHECK_FALSE(check_equivalent(min, 1, 0, 1));
}

TEST_CASE("retargeting preserves each type's decision distribution") {
  Mat rates(2, 2);
  rates << 0.9, 0.2, 0.3, 0.8;
  const PassageMatrix env =
      PassageMatrix::binary({"lo", "hi"}, {"a", "b"}, rates);
  const auto f = most_discerning_function(env);
  REQUIRE(f.selection.has_value());

  TestingRule testing(2, 2);
  testing << 0.5, 0.5, 0.2, 0.8;
  DecisionRule g;
  g.num_decisions = 2;
  g.value.assign(2, std::vector<std::vector<Vec>>(
                        2, std::vector<Vec>(2, Vec::Zero(2))));
  std::mt19937 rng(31);
  for (auto& per_test : g.value) {
    for (auto& per_score : per_test) {
      for (auto& v : per_score) v = testutil::random_simplex(rng, 2);
    }
  }

  const RetargetedRule rule = retarget_tests(env, testing, g, *f.selection);
  const auto before = social_choice(env, testing, g);
  const auto after = social_choice(env, rule);
  for (std::size_t th = 0; th < 2; ++th) {
    CHECK((before[th] - after[th]).cwiseAbs().maxCoeff() < 1e-12);
  }
}
