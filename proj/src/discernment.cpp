#include "veritest/discernment.hpp"

#include "veritest/small_lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace veritest {

namespace {
constexpr double kDegeneracyTol = 1e-12;
}  // namespace

PassageMatrix::PassageMatrix(std::vector<std::string> types, std::vector<std::string> tests,
                             ScoreSet scoreset, std::vector<std::vector<Measure>> dist)
    : types_(std::move(types)),
      tests_(std::move(tests)),
      scoreset_(std::move(scoreset)),
      dist_(std::move(dist)) {
  if (types_.empty() || tests_.empty()) {
    throw std::invalid_argument("PassageMatrix: empty type or test list");
  }
  if (dist_.size() != tests_.size()) {
    throw std::invalid_argument("PassageMatrix: one row of measures per test required");
  }
  for (const auto& row : dist_) {
    if (row.size() != types_.size()) {
      throw std::invalid_argument("PassageMatrix: one measure per type required");
    }
    for (const auto& m : row) {
      if (m.scoreset() != scoreset_) {
        throw std::invalid_argument("PassageMatrix: measure on wrong score set");
      }
    }
  }
}

PassageMatrix PassageMatrix::binary(std::vector<std::string> types,
                                    std::vector<std::string> tests, const Mat& pass_rates) {
  if (pass_rates.rows() != static_cast<Eigen::Index>(tests.size()) ||
      pass_rates.cols() != static_cast<Eigen::Index>(types.size())) {
    throw std::invalid_argument("PassageMatrix: pass-rate shape mismatch");
  }
  std::vector<std::vector<Measure>> dist;
  dist.reserve(tests.size());
  for (Eigen::Index i = 0; i < pass_rates.rows(); ++i) {
    std::vector<Measure> row;
    row.reserve(types.size());
    for (Eigen::Index j = 0; j < pass_rates.cols(); ++j) {
      row.push_back(Measure::bernoulli(pass_rates(i, j)));
    }
    dist.push_back(std::move(row));
  }
  return PassageMatrix(std::move(types), std::move(tests), ScoreSet::binary(), std::move(dist));
}

bool PassageMatrix::binary_scores() const { return scoreset_ == ScoreSet::binary(); }

std::size_t PassageMatrix::type_index(const std::string& label) const {
  const auto it = std::find(types_.begin(), types_.end(), label);
  if (it == types_.end()) throw std::invalid_argument("unknown type label: " + label);
  return static_cast<std::size_t>(it - types_.begin());
}

std::size_t PassageMatrix::test_index(const std::string& label) const {
  const auto it = std::find(tests_.begin(), tests_.end(), label);
  if (it == tests_.end()) throw std::invalid_argument("unknown test label: " + label);
  return static_cast<std::size_t>(it - tests_.begin());
}

std::optional<LambdaInterval> intersect_half_lines(
    const std::vector<std::pair<double, double>>& constraints, double degeneracy_tol) {
  double lo = 0.0, hi = 1.0;
  for (const auto& [a, b] : constraints) {
    if (std::abs(a) < degeneracy_tol) {
      if (b < -degeneracy_tol) return std::nullopt;
    } else if (a > 0.0) {
      hi = std::min(hi, b / a);
    } else {
      lo = std::max(lo, b / a);
    }
  }
  if (lo > hi + degeneracy_tol) return std::nullopt;
  return LambdaInterval{lo, std::max(lo, hi)};
}

namespace {

// Parametric half-line constraints of the binary characterization; one pair
// (a, b) meaning a * lambda <= b per type theta'.
std::vector<std::pair<double, double>> binary_constraints(const PassageMatrix& env,
                                                          std::size_t theta, std::size_t tau,
                                                          std::size_t psi, bool* degenerate) {
  const double pt = env.pass_rate(tau, theta);
  const double pp = env.pass_rate(psi, theta);
  std::vector<std::pair<double, double>> out;
  out.reserve(env.num_types());
  for (std::size_t o = 0; o < env.num_types(); ++o) {
    if (o == theta) continue;
    double a, b;
    if (pt >= pp) {
      // [l*pt' + (1-l)*pt] * pp <= pp' * pt
      const double pto = env.pass_rate(tau, o);
      const double ppo = env.pass_rate(psi, o);
      a = (pto - pt) * pp;
      b = pt * (ppo - pp);
    } else {
      // [l*qt' + (1-l)*qt] * qp >= qp' * qt  (failure rates)
      const double qt = 1.0 - pt, qp = 1.0 - pp;
      const double qto = 1.0 - env.pass_rate(tau, o);
      const double qpo = 1.0 - env.pass_rate(psi, o);
      a = -(qto - qt) * qp;
      b = -qt * (qpo - qp);
    }
    if (degenerate != nullptr && std::abs(a) < kDegeneracyTol && std::abs(b) < kDegeneracyTol) {
      *degenerate = true;
    }
    out.emplace_back(a, b);
  }
  return out;
}

Transition binary_witness(const PassageMatrix& env, std::size_t theta, std::size_t tau,
                          std::size_t psi, double lambda) {
  const Measure& mt = env.dist(tau, theta);
  const Measure& mp = env.dist(psi, theta);
  return blend(lambda, fq_compose(mt, mp), Transition::constant(mt.scoreset(), mp));
}

}  // namespace

DiscernmentWitness check_discerning(const PassageMatrix& env, std::size_t theta,
                                    std::size_t tau, std::size_t psi, bool force_lambda_one) {
  if (theta >= env.num_types() || tau >= env.num_tests() || psi >= env.num_tests()) {
    throw std::invalid_argument("check_discerning: index out of range");
  }
  if (!env.binary_scores()) return check_discerning_lp(env, theta, tau, psi);

  DiscernmentWitness w;
  auto constraints = binary_constraints(env, theta, tau, psi, &w.degenerate);
  auto interval = intersect_half_lines(constraints);
  if (interval && force_lambda_one) {
    if (interval->hi >= 1.0 - kDegeneracyTol) {
      interval = LambdaInterval{1.0, 1.0};
    } else {
      interval.reset();
    }
  }
  if (!interval) return w;
  w.holds = true;
  w.lambda_interval = *interval;
  w.conversion = binary_witness(env, theta, tau, psi, interval->midpoint());
  return w;
}

DiscernmentWitness check_discerning_lp(const PassageMatrix& env, std::size_t theta,
                                       std::size_t tau, std::size_t psi, int extremal) {
  const auto n = static_cast<Eigen::Index>(env.scoreset().size());
  if (n > 8) throw std::invalid_argument("check_discerning_lp: score sets capped at 8");
  const Eigen::Index nvar = n * n;
  const auto idx = [n](Eigen::Index i, Eigen::Index j) { return i * n + j; };

  const Vec& mt = env.dist(tau, theta).weights();
  const Vec& mp = env.dist(psi, theta).weights();

  LinearProgram lp;
  lp.c = Vec::Zero(nvar);
  // Row-stochastic + pushforward equality.
  lp.A_eq = Mat::Zero(2 * n, nvar);
  lp.b_eq = Vec::Zero(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) lp.A_eq(i, idx(i, j)) = 1.0;
    lp.b_eq[i] = 1.0;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) lp.A_eq(n + j, idx(i, j)) = mt[i];
    lp.b_eq[n + j] = mp[j];
  }
  // Monotone rows + dominance for the other types.
  const auto others = static_cast<Eigen::Index>(env.num_types()) - 1;
  const Eigen::Index mono_rows = (n - 1) * (n - 1);
  const Eigen::Index dom_rows = others * (n - 1);
  lp.A_le = Mat::Zero(mono_rows + dom_rows, nvar);
  lp.b_le = Vec::Zero(mono_rows + dom_rows);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    for (Eigen::Index l = 0; l + 1 < n; ++l, ++r) {
      for (Eigen::Index j = 0; j <= l; ++j) {
        lp.A_le(r, idx(i + 1, j)) = 1.0;
        lp.A_le(r, idx(i, j)) = -1.0;
      }
    }
  }
  for (std::size_t o = 0; o < env.num_types(); ++o) {
    if (o == theta) continue;
    const Vec& to = env.dist(tau, o).weights();
    const Measure& po = env.dist(psi, o);
    for (Eigen::Index l = 0; l + 1 < n; ++l, ++r) {
      // CDF of the converted measure at l must be >= CDF of psi's measure.
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= l; ++j) lp.A_le(r, idx(i, j)) = -to[i];
      }
      lp.b_le[r] = -po.cdf(static_cast<std::size_t>(l));
    }
  }

  // Optional extremal objective along the segment direction of the binary
  // characterization (used to recover the lambda range on binary data).
  Mat direction;
  if (extremal != 0) {
    const Mat fq = fq_compose(env.dist(tau, theta), env.dist(psi, theta)).matrix();
    const Mat cons = Transition::constant(env.scoreset(), env.dist(psi, theta)).matrix();
    direction = fq - cons;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        lp.c[idx(i, j)] = -static_cast<double>(extremal) * direction(i, j);
      }
    }
  }

  DiscernmentWitness w;
  auto sol = solve_lp(lp);
  if (!sol) return w;
  w.holds = true;
  Mat rows(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) rows(i, j) = std::max(0.0, sol->x[idx(i, j)]);
  }
  rows.array().colwise() /= rows.rowwise().sum().array();
  w.conversion = Transition(env.scoreset(), env.scoreset(), rows);
  if (extremal != 0) {
    const double dd = direction.squaredNorm();
    if (dd > kDegeneracyTol) {
      const Mat cons = Transition::constant(env.scoreset(), env.dist(psi, theta)).matrix();
      const double lambda = ((rows - cons).array() * direction.array()).sum() / dd;
      w.lambda_interval = LambdaInterval{lambda, lambda};
    } else {
      w.degenerate = true;
    }
  }
  return w;
}

bool check_equivalent(const PassageMatrix& env, std::size_t theta, std::size_t tau1,
                      std::size_t tau2) {
  if (theta >= env.num_types() || tau1 >= env.num_tests() || tau2 >= env.num_tests()) {
    throw std::invalid_argument("check_equivalent: index out of range");
  }
  bool equal = true;
  for (std::size_t o = 0; o < env.num_types() && equal; ++o) {
    equal = (env.dist(tau1, o).weights() - env.dist(tau2, o).weights())
                .cwiseAbs()
                .maxCoeff() <= kDegeneracyTol;
  }
  if (equal) return true;
  for (std::size_t t : {tau1, tau2}) {
    for (std::size_t o = 0; o < env.num_types(); ++o) {
      // theta minimal on t: every other type dominates theta's distribution.
      if (!fosd_geq(env.dist(t, o), env.dist(t, theta))) return false;
    }
  }
  return true;
}

std::vector<std::size_t> most_discerning_tests(const PassageMatrix& env, std::size_t theta) {
  std::vector<std::size_t> out;
  for (std::size_t tau = 0; tau < env.num_tests(); ++tau) {
    bool all = true;
    for (std::size_t psi = 0; psi < env.num_tests() && all; ++psi) {
      if (psi == tau) continue;
      all = check_discerning(env, theta, tau, psi).holds;
    }
    if (all) out.push_back(tau);
  }
  return out;
}

MostDiscerningFunction most_discerning_function(const PassageMatrix& env) {
  MostDiscerningFunction out;
  std::vector<std::size_t> selection;
  for (std::size_t theta = 0; theta < env.num_types(); ++theta) {
    auto tests = most_discerning_tests(env, theta);
    if (tests.empty()) {
      out.failing_types.push_back(theta);
    } else {
      selection.push_back(tests.front());
    }
  }
  if (out.failing_types.empty()) out.selection = std::move(selection);
  return out;
}

RetargetedRule retarget_tests(const PassageMatrix& env, const TestingRule& testing,
                              const DecisionRule& g, const std::vector<std::size_t>& tdhat) {
  const std::size_t ntypes = env.num_types();
  const std::size_t ntests = env.num_tests();
  const std::size_t nscores = env.scoreset().size();
  if (tdhat.size() != ntypes) throw std::invalid_argument("retarget_tests: tdhat size mismatch");
  if (testing.rows() != static_cast<Eigen::Index>(ntypes) ||
      testing.cols() != static_cast<Eigen::Index>(ntests)) {
    throw std::invalid_argument("retarget_tests: testing rule shape mismatch");
  }

  RetargetedRule out;
  out.tdhat = tdhat;
  out.ghat.resize(ntypes);
  for (std::size_t theta = 0; theta < ntypes; ++theta) {
    // Witness conversions from the retargeted test to each original test.
    std::vector<Transition> conv;
    conv.reserve(ntests);
    for (std::size_t psi = 0; psi < ntests; ++psi) {
      auto w = check_discerning(env, theta, tdhat[theta], psi);
      if (!w.holds) {
        throw std::invalid_argument("retarget_tests: tdhat is not most discerning");
      }
      conv.push_back(*w.conversion);
    }
    out.ghat[theta].assign(nscores, Vec::Zero(static_cast<Eigen::Index>(g.num_decisions)));
    for (std::size_t s = 0; s < nscores; ++s) {
      for (std::size_t psi = 0; psi < ntests; ++psi) {
        const double tw = testing(static_cast<Eigen::Index>(theta),
                                  static_cast<Eigen::Index>(psi));
        if (tw <= 0.0) continue;
        for (std::size_t sp = 0; sp < nscores; ++sp) {
          out.ghat[theta][s] += tw *
                                conv[psi].matrix()(static_cast<Eigen::Index>(s),
                                                   static_cast<Eigen::Index>(sp)) *
                                g.value[theta][psi][sp];
        }
      }
    }
  }
  return out;
}

std::vector<Vec> social_choice(const PassageMatrix& env, const TestingRule& testing,
                               const DecisionRule& g) {
  std::vector<Vec> out;
  out.reserve(env.num_types());
  for (std::size_t theta = 0; theta < env.num_types(); ++theta) {
    Vec f = Vec::Zero(static_cast<Eigen::Index>(g.num_decisions));
    for (std::size_t psi = 0; psi < env.num_tests(); ++psi) {
      const double tw = testing(static_cast<Eigen::Index>(theta),
                                static_cast<Eigen::Index>(psi));
      if (tw <= 0.0) continue;
      const Vec& pw = env.dist(psi, theta).weights();
      for (std::size_t s = 0; s < env.scoreset().size(); ++s) {
        f += tw * pw[static_cast<Eigen::Index>(s)] * g.value[theta][psi][s];
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Vec> social_choice(const PassageMatrix& env, const RetargetedRule& rule) {
  std::vector<Vec> out;
  out.reserve(env.num_types());
  for (std::size_t theta = 0; theta < env.num_types(); ++theta) {
    Vec f = Vec::Zero(rule.ghat[theta].empty() ? 0 : rule.ghat[theta][0].size());
    const Vec& pw = env.dist(rule.tdhat[theta], theta).weights();
    for (std::size_t s = 0; s < env.scoreset().size(); ++s) {
      f += pw[static_cast<Eigen::Index>(s)] * rule.ghat[theta][s];
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace veritest
