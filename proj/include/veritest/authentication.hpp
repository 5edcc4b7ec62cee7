// Reduced-form verification: authentication-rate matrices alpha(report|type),
// validation of the most-discerning property, essential equality, and the
// round trip between authentication rates and binary testing environments.
#pragma once

#include "veritest/discernment.hpp"
#include "veritest/finite_markov.hpp"

#include <optional>
#include <string>
#include <vector>

namespace veritest {

struct FiniteAuthRate {
  std::vector<std::string> types;
  // alpha(i, j) = probability that type j is authenticated when reporting
  // type i; entries in [0,1].
  Mat alpha;

  double operator()(std::size_t report, std::size_t type) const {
    return alpha(static_cast<Eigen::Index>(report), static_cast<Eigen::Index>(type));
  }
};

FiniteAuthRate make_auth_rate(std::vector<std::string> types, Mat alpha);

struct AlphaViolation {
  std::size_t theta1, theta2, theta3;
  double slack;  // amount by which the certificate inequality fails
};

struct AlphaValidation {
  bool most_discerning = false;
  std::optional<AlphaViolation> violation;
  bool used_fast_path = false;  // triple-product check under diagonal dominance
};

AlphaValidation is_most_discerning_alpha(const FiniteAuthRate& a);

// Types theta with alpha(theta|theta) <= alpha(theta|theta') for all theta'.
std::vector<bool> minimal_types(const FiniteAuthRate& a);

// Same minimal-type sets and identical rows for non-minimal types.
bool essentially_equal(const FiniteAuthRate& a1, const FiniteAuthRate& a2,
                       double tol = 1e-12);

// alpha(theta'|theta) = pi(tdhat(theta') | theta) for a binary environment
// with a most-discerning testing function tdhat.
FiniteAuthRate induce_alpha(const PassageMatrix& env, const std::vector<std::size_t>& tdhat);

// One test per type with pi(tau_theta' | theta) = alpha(theta'|theta), plus
// the identity testing function; requires a to be most discerning.
struct AlphaEnvironment {
  PassageMatrix env;
  std::vector<std::size_t> tdhat;
};

AlphaEnvironment environment_from_alpha(const FiniteAuthRate& a);

}  // namespace veritest
