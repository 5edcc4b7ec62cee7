// Brute-force verification: incentive compatibility of solved mechanisms on
// their grids, and the executable canonicalization (revelation principle) of
// finite profiles with exhaustive deviation search.
#pragma once

#include "veritest/discernment.hpp"
#include "veritest/finite_markov.hpp"
#include "veritest/mechanisms.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace veritest {

// Authentication rate as a callable (report, type) -> [0,1].
using AlphaFn = std::function<double(double, double)>;

struct ICReport {
  double max_ic_violation = 0.0;
  double max_ir_violation = 0.0;
  std::pair<int, int> worst_pair{-1, -1};  // (type index, report index)
  double max_shirk_violation = 0.0;        // outside-option branch
  std::vector<std::pair<int, int>> binding;  // constraints tight within 1e-9

  bool passes(double tol = 1e-6) const {
    return max_ic_violation <= tol && max_ir_violation <= tol && max_shirk_violation <= tol;
  }
};

ICReport check_ic(const SolvedMechanism& mech, const AlphaFn& alpha);

ICReport check_auction_ic(const AuctionSolution& sol, const std::vector<AlphaFn>& alphas);

// Finite single-agent profile: a testing environment plus strategies, a
// decision rule and utilities. Messages are indexed separately from types.
struct FiniteProfile {
  PassageMatrix env;     // dist per (test, type)
  std::size_t num_messages = 0;
  std::size_t num_decisions = 0;
  Mat r;                 // reporting strategy: types x messages, row-stochastic
  TestingRule testing;   // messages x tests, row-stochastic
  // Performance strategy p[type][message][test]; must be FOSD-dominated by
  // the passage rate of the test.
  std::vector<std::vector<std::vector<Measure>>> p;
  // Decision rule g[message][test][score]: probability vector over decisions.
  std::vector<std::vector<std::vector<Vec>>> g;
  Mat u;                 // utilities: decisions x types

  void validate() const;
  // Induced decision distribution per type under (r, testing, p, g).
  std::vector<Vec> social_choice_function() const;
  // Expected utility of each type under the profile as played.
  std::vector<double> value_as_played() const;
};

// Vertices of { p : p FOSD-dominated by pi } (shirk-to-bottom mixtures).
// Exact for every score set size; at most 2^(n-1) candidates are emitted.
std::vector<Vec> dominated_vertices(const Measure& pi);

struct DeviationSearch {
  std::vector<double> best_value;          // per type, over pure reports and efforts
  std::vector<std::size_t> best_message;   // argmax report
};

DeviationSearch exhaustive_deviation_search(const FiniteProfile& profile);

struct CanonicalizationReport {
  double scf_max_diff = 0.0;      // canonical vs original, per (type, decision)
  bool original_ic = false;
  bool canonical_ic = false;
  double original_slack = 0.0;    // best deviation minus played value
  double canonical_slack = 0.0;
};

struct Canonicalization {
  FiniteProfile canonical;
  CanonicalizationReport report;
};

// Direct truthful full-effort profile with t_hat = r * t and the decision
// rule composed through the disintegration and downward conversions.
Canonicalization canonicalize(const FiniteProfile& profile, double ic_tol = 1e-9);

}  // namespace veritest
