#include "veritest/authentication.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace veritest;

namespace {

FiniteAuthRate chain_alpha() {
  Mat a(3, 3);
  a << 1, 0, 0, 1, 1, 0, 0, 1, 1;
  return make_auth_rate({"theta1", "theta2", "theta3"}, a);
}

// Multiplicative family: alpha(r|t) = exp(-lp * (v_r - v_t)+ - lm * (v_t - v_r)+).
FiniteAuthRate multiplicative_alpha(const std::vector<double>& v, double lp, double lm) {
  const auto n = static_cast<Eigen::Index>(v.size());
  Mat a(n, n);
  std::vector<std::string> types;
  for (Eigen::Index r = 0; r < n; ++r) {
    types.push_back("t" + std::to_string(r));
    for (Eigen::Index t = 0; t < n; ++t) {
      const double d = v[static_cast<std::size_t>(r)] - v[static_cast<std::size_t>(t)];
      a(r, t) = std::exp(d > 0 ? -lp * d : lm * d);
    }
  }
  return make_auth_rate(types, a);
}

}  // namespace

TEST_CASE("nested-range failure is certified") {
  const auto v = is_most_discerning_alpha(chain_alpha());
  CHECK_FALSE(v.most_discerning);
  REQUIRE(v.violation.has_value());
  CHECK(v.violation->theta1 == 0);
  CHECK(v.violation->theta2 == 1);
  CHECK(v.violation->theta3 == 2);
  CHECK(v.violation->slack > 0.0);
}

TEST_CASE("multiplicative rates are most discerning") {
  const auto a = multiplicative_alpha({0.1, 0.5, 0.9}, 1.3, 0.7);
  const auto v = is_most_discerning_alpha(a);
  CHECK(v.most_discerning);
  CHECK_FALSE(v.violation.has_value());
}

TEST_CASE("minimal types") {
  // A type is minimal when its own-report rate is the smallest entry of its
  // row: alpha(t|t) <= alpha(t|t') for every t'.
  Mat a(2, 2);
  a << 0.5, 0.8, 0.6, 1.0;
  const auto m = minimal_types(make_auth_rate({"a", "b"}, a));
  CHECK(m[0]);        // 0.5 <= 0.8
  CHECK_FALSE(m[1]);  // 1.0 > 0.6
}

TEST_CASE("essential equality ignores minimal-type rows") {
  Mat a(2, 2), b(2, 2);
  a << 0.2, 0.9, 0.3, 1.0;
  b << 0.1, 0.7, 0.3, 1.0;  // row 0 differs, but type 0 is minimal in both
  const auto ra = make_auth_rate({"a", "b"}, a);
  const auto rb = make_auth_rate({"a", "b"}, b);
  CHECK(essentially_equal(ra, rb));
  Mat c = a;
  c(1, 0) = 0.4;  // non-minimal row differs
  CHECK_FALSE(essentially_equal(ra, make_auth_rate({"a", "b"}, c)));
}

TEST_CASE("environment round trip") {
  const auto a = multiplicative_alpha({0.2, 0.6, 1.0}, 0.9, 1.4);
  const AlphaEnvironment env = environment_from_alpha(a);
  const FiniteAuthRate back = induce_alpha(env.env, env.tdhat);
  CHECK(essentially_equal(a, back, 1e-12));
}

TEST_CASE("environment construction rejects invalid rates") {
  CHECK_THROWS(environment_from_alpha(chain_alpha()));
  Mat bad(2, 2);
  bad << 1.0, 1.5, 0.2, 1.0;
  CHECK_THROWS(make_auth_rate({"a", "b"}, bad));
}
