// Discernment orders between stochastic tests: decide whether one test is
// more discerning than another for a given type, construct witnessing score
// conversions, and search for most-discerning tests and testing functions.
#pragma once

#include "veritest/finite_markov.hpp"

#include <optional>
#include <string>
#include <vector>

namespace veritest {

// Finite testing environment: a score distribution per (test, type).
class PassageMatrix {
 public:
  PassageMatrix(std::vector<std::string> types, std::vector<std::string> tests,
                ScoreSet scoreset, std::vector<std::vector<Measure>> dist);

  // Binary shorthand: pass_rates(i, j) = P(top score | test i, type j).
  static PassageMatrix binary(std::vector<std::string> types,
                              std::vector<std::string> tests, const Mat& pass_rates);

  std::size_t num_types() const { return types_.size(); }
  std::size_t num_tests() const { return tests_.size(); }
  const std::vector<std::string>& types() const { return types_; }
  const std::vector<std::string>& tests() const { return tests_; }
  const ScoreSet& scoreset() const { return scoreset_; }
  bool binary_scores() const;

  const Measure& dist(std::size_t test, std::size_t type) const {
    return dist_[test][type];
  }
  double pass_rate(std::size_t test, std::size_t type) const {
    return dist_[test][type].top_mass();
  }

  std::size_t type_index(const std::string& label) const;
  std::size_t test_index(const std::string& label) const;

 private:
  std::vector<std::string> types_, tests_;
  ScoreSet scoreset_;
  std::vector<std::vector<Measure>> dist_;  // [test][type]
};

struct LambdaInterval {
  double lo, hi;
  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

// Intersection of { lambda in [0,1] : a_i * lambda <= b_i } over all i.
// Coefficients below `degeneracy_tol` in magnitude are treated as
// unconstrained or infeasible by the sign of the constant term.
std::optional<LambdaInterval> intersect_half_lines(
    const std::vector<std::pair<double, double>>& constraints,
    double degeneracy_tol = 1e-12);

struct DiscernmentWitness {
  bool holds = false;
  std::optional<Transition> conversion;          // monotone witness when holds
  std::optional<LambdaInterval> lambda_interval; // binary path only
  bool degenerate = false;  // some constraint coefficient below 1e-12
};

// Decide tau >=_theta psi. Binary environments use the exact parametric
// half-line intersection; general score sets use linear feasibility over
// monotone transitions. `force_lambda_one` restricts the binary search to
// lambda = 1.
DiscernmentWitness check_discerning(const PassageMatrix& env, std::size_t theta,
                                    std::size_t tau, std::size_t psi,
                                    bool force_lambda_one = false);

// The nonbinary linear-feasibility path, callable directly on binary data
// for cross-validation. `extremal` > 0 maximizes the witness mass that the
// bottom source row keeps away from the constant transition (used to recover
// the lambda range on binary data): +1 maximizes lambda, -1 minimizes it.
DiscernmentWitness check_discerning_lp(const PassageMatrix& env, std::size_t theta,
                                       std::size_t tau, std::size_t psi,
                                       int extremal = 0);

// Theta-equivalence: equal passage rows, or theta minimal on both tests.
bool check_equivalent(const PassageMatrix& env, std::size_t theta, std::size_t tau1,
                      std::size_t tau2);

// All tests tau with tau >=_theta psi for every psi.
std::vector<std::size_t> most_discerning_tests(const PassageMatrix& env, std::size_t theta);

struct MostDiscerningFunction {
  std::optional<std::vector<std::size_t>> selection;  // type -> test (lowest index)
  std::vector<std::size_t> failing_types;
};

MostDiscerningFunction most_discerning_function(const PassageMatrix& env);

// Decision rule over (message/type, test, score): distribution over decisions.
struct DecisionRule {
  std::size_t num_decisions = 0;
  // value[m][test][score] is a probability vector over decisions.
  std::vector<std::vector<std::vector<Vec>>> value;
};

// Stochastic testing rule: row per message, distribution over tests.
using TestingRule = Mat;

// Decision rule after retargeting every report to the tests in tdhat:
// ghat[type][score] is a probability vector over decisions.
struct RetargetedRule {
  std::vector<std::size_t> tdhat;
  std::vector<std::vector<Vec>> ghat;
};

// Compose a canonical decision rule with witness score conversions so that
// each report theta' is examined with tdhat[theta'] instead of the tests
// drawn by `testing`. Requires tdhat[theta'] to be most theta'-discerning.
RetargetedRule retarget_tests(const PassageMatrix& env, const TestingRule& testing,
                              const DecisionRule& g, const std::vector<std::size_t>& tdhat);

// Induced decision distribution per type under truthful full-effort play.
std::vector<Vec> social_choice(const PassageMatrix& env, const TestingRule& testing,
                               const DecisionRule& g);
std::vector<Vec> social_choice(const PassageMatrix& env, const RetargetedRule& rule);

}  // namespace veritest
