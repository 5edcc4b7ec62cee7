#include "veritest/ic_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace veritest {

namespace {
constexpr double kBindingTol = 1e-9;
constexpr std::size_t kMaxBinding = 100;
}  // namespace

ICReport check_ic(const SolvedMechanism& mech, const AlphaFn& alpha) {
  ICReport rep;
  const Eigen::Index n = mech.grid.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double theta = mech.grid[i];
    const double truth = theta * mech.q[i] - mech.t[i];
    if (-truth > rep.max_ir_violation) rep.max_ir_violation = -truth;
    // Shirking yields the outside option (0,0).
    if (-truth > rep.max_shirk_violation) rep.max_shirk_violation = -truth;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double gain = theta * mech.q[j] - mech.t[j];
      const double dev = alpha(mech.grid[j], theta) * std::max(gain, 0.0);
      const double violation = dev - truth;
      if (violation > rep.max_ic_violation) {
        rep.max_ic_violation = violation;
        rep.worst_pair = {static_cast<int>(i), static_cast<int>(j)};
      }
      if (std::abs(violation) <= kBindingTol && rep.binding.size() < kMaxBinding) {
        rep.binding.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  return rep;
}

ICReport check_auction_ic(const AuctionSolution& sol, const std::vector<AlphaFn>& alphas) {
  if (alphas.size() != sol.grids.size()) {
    throw std::invalid_argument("check_auction_ic: one alpha per agent required");
  }
  ICReport rep;
  for (std::size_t a = 0; a < sol.grids.size(); ++a) {
    const Eigen::Index n = sol.grids[a].size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double theta = sol.grids[a][i];
      const double truth = sol.Q[a][i] * (theta - sol.price[a][i]);
      if (-truth > rep.max_ir_violation) rep.max_ir_violation = -truth;
      // Pay-only-if-win participation: the winning price never exceeds the
      // truthful report.
      if (sol.Q[a][i] > 0.0) {
        const double over = sol.price[a][i] - theta;
        if (over > rep.max_shirk_violation) rep.max_shirk_violation = over;
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double gain = sol.Q[a][j] * (theta - sol.price[a][j]);
        const double dev = alphas[a](sol.grids[a][j], theta) * std::max(gain, 0.0);
        const double violation = dev - truth;
        if (violation > rep.max_ic_violation) {
          rep.max_ic_violation = violation;
          rep.worst_pair = {static_cast<int>(i), static_cast<int>(j)};
        }
      }
    }
  }
  return rep;
}

void FiniteProfile::validate() const {
  const auto ntypes = static_cast<Eigen::Index>(env.num_types());
  const auto ntests = static_cast<Eigen::Index>(env.num_tests());
  const auto nmsg = static_cast<Eigen::Index>(num_messages);
  if (r.rows() != ntypes || r.cols() != nmsg) {
    throw std::invalid_argument("FiniteProfile: reporting strategy shape mismatch");
  }
  if (testing.rows() != nmsg || testing.cols() != ntests) {
    throw std::invalid_argument("FiniteProfile: testing rule shape mismatch");
  }
  auto stochastic = [](const Mat& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if ((m.row(i).array() < -kProbTol).any() || std::abs(m.row(i).sum() - 1.0) > 1e-9) {
        return false;
      }
    }
    return true;
  };
  if (!stochastic(r) || !stochastic(testing)) {
    throw std::invalid_argument("FiniteProfile: strategy rows must be distributions");
  }
  if (p.size() != env.num_types() || g.size() != num_messages) {
    throw std::invalid_argument("FiniteProfile: p/g size mismatch");
  }
  for (std::size_t theta = 0; theta < env.num_types(); ++theta) {
    for (std::size_t m = 0; m < num_messages; ++m) {
      for (std::size_t tau = 0; tau < env.num_tests(); ++tau) {
        if (!fosd_geq(env.dist(tau, theta), p[theta][m][tau])) {
          throw std::invalid_argument("FiniteProfile: performance exceeds the passage rate");
        }
      }
    }
  }
  if (u.rows() != static_cast<Eigen::Index>(num_decisions) || u.cols() != ntypes) {
    throw std::invalid_argument("FiniteProfile: utility shape mismatch");
  }
}

std::vector<Vec> FiniteProfile::social_choice_function() const {
  std::vector<Vec> out;
  out.reserve(env.num_types());
  for (std::size_t theta = 0; theta < env.num_types(); ++theta) {
    Vec f = Vec::Zero(static_cast<Eigen::Index>(num_decisions));
    for (std::size_t m = 0; m < num_messages; ++m) {
      const double rw = r(static_cast<Eigen::Index>(theta), static_cast<Eigen::Index>(m));
      if (rw <= 0.0) continue;
      for (std::size_t tau = 0; tau < env.num_tests(); ++tau) {
        const double tw = testing(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(tau));
        if (tw <= 0.0) continue;
        const Vec& pw = p[theta][m][tau].weights();
        for (Eigen::Index s = 0; s < pw.size(); ++s) {
          f += rw * tw * pw[s] * g[m][tau][static_cast<std::size_t>(s)];
        }
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<double> FiniteProfile::value_as_played() const {
  const auto scf = social_choice_function();
  std::vector<double> out(env.num_types());
  for (std::size_t theta = 0; theta < env.num_types(); ++theta) {
    out[theta] = u.col(static_cast<Eigen::Index>(theta)).dot(scf[theta]);
  }
  return out;
}

std::vector<Vec> dominated_vertices(const Measure& pi) {
  // Vertices of { p : p FOSD-dominated by pi } in CDF form: G(n-1) = 1 and,
  // going down, each coordinate either sits on its own bound F(l) or chains
  // to the coordinate above.
  const auto n = static_cast<std::size_t>(pi.size());
  std::vector<double> cdf(n);
  for (std::size_t i = 0; i < n; ++i) cdf[i] = pi.cdf(i);

  std::vector<Vec> out;
  std::vector<double> current(n, 1.0);
  auto emit = [&]() {
    Vec w(static_cast<Eigen::Index>(n));
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[static_cast<Eigen::Index>(i)] = std::max(0.0, current[i] - prev);
      prev = current[i];
    }
    for (const auto& seen : out) {
      if ((seen - w).cwiseAbs().maxCoeff() <= kProbTol) return;
    }
    out.emplace_back(std::move(w));
  };
  std::function<void(std::size_t)> rec = [&](std::size_t pos) {
    if (pos == 0) {
      emit();
      return;
    }
    const std::size_t l = pos - 1;
    current[l] = current[pos];  // chain to the coordinate above
    rec(l);
    if (cdf[l] <= current[pos] + kProbTol) {
      current[l] = std::min(cdf[l], current[pos]);
      rec(l);
    }
    current[l] = 1.0;
  };
  rec(n - 1);
  return out;
}

DeviationSearch exhaustive_deviation_search(const FiniteProfile& profile) {
  const std::size_t ntypes = profile.env.num_types();
  const std::size_t ntests = profile.env.num_tests();
  DeviationSearch out;
  out.best_value.assign(ntypes, 0.0);
  out.best_message.assign(ntypes, 0);
  for (std::size_t theta = 0; theta < ntypes; ++theta) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_m = 0;
    for (std::size_t m = 0; m < profile.num_messages; ++m) {
      double value = 0.0;
      for (std::size_t tau = 0; tau < ntests; ++tau) {
        const double tw = profile.testing(static_cast<Eigen::Index>(m),
                                          static_cast<Eigen::Index>(tau));
        if (tw <= 0.0) continue;
        // Score payoffs for this (message, test).
        const std::size_t ns = profile.env.scoreset().size();
        Vec w(static_cast<Eigen::Index>(ns));
        for (std::size_t s = 0; s < ns; ++s) {
          w[static_cast<Eigen::Index>(s)] =
              profile.u.col(static_cast<Eigen::Index>(theta)).dot(profile.g[m][tau][s]);
        }
        // Optimal performance over the dominated polytope (linear payoff,
        // extreme points suffice).
        double best_perf = -std::numeric_limits<double>::infinity();
        for (const Vec& v : dominated_vertices(profile.env.dist(tau, theta))) {
          best_perf = std::max(best_perf, w.dot(v));
        }
        value += tw * best_perf;
      }
      if (value > best) {
        best = value;
        best_m = m;
      }
    }
    out.best_value[theta] = best;
    out.best_message[theta] = best_m;
  }
  return out;
}

Canonicalization canonicalize(const FiniteProfile& profile, double ic_tol) {
  profile.validate();
  const std::size_t ntypes = profile.env.num_types();
  const std::size_t ntests = profile.env.num_tests();
  const std::size_t ns = profile.env.scoreset().size();

  Canonicalization out{profile, {}};
  FiniteProfile& canon = out.canonical;

  // Direct truthful reporting with full effort.
  canon.num_messages = ntypes;
  canon.r = Mat::Identity(static_cast<Eigen::Index>(ntypes), static_cast<Eigen::Index>(ntypes));
  canon.testing = profile.r * profile.testing;  // t_hat = r t
  canon.p.assign(ntypes, std::vector<std::vector<Measure>>(
                             ntypes, std::vector<Measure>()));
  for (std::size_t theta = 0; theta < ntypes; ++theta) {
    for (std::size_t m = 0; m < ntypes; ++m) {
      canon.p[theta][m].reserve(ntests);
      for (std::size_t tau = 0; tau < ntests; ++tau) {
        canon.p[theta][m].push_back(profile.env.dist(tau, theta));
      }
    }
  }

  // g_hat(theta', tau, s) = sum_m h(m | theta', tau) sum_s' d(s, s') g(m, tau, s'),
  // where h is the disintegration of r x t and d converts full-effort scores
  // into the originally played performance.
  canon.g.assign(ntypes, std::vector<std::vector<Vec>>(
                             ntests, std::vector<Vec>(
                                         ns, Vec::Zero(static_cast<Eigen::Index>(
                                                 profile.num_decisions)))));
  for (std::size_t theta = 0; theta < ntypes; ++theta) {
    for (std::size_t tau = 0; tau < ntests; ++tau) {
      // Conditional distribution of the original message given (theta', tau).
      Vec h = Vec::Zero(static_cast<Eigen::Index>(profile.num_messages));
      double total = 0.0;
      for (std::size_t m = 0; m < profile.num_messages; ++m) {
        const double w = profile.r(static_cast<Eigen::Index>(theta),
                                   static_cast<Eigen::Index>(m)) *
                         profile.testing(static_cast<Eigen::Index>(m),
                                         static_cast<Eigen::Index>(tau));
        h[static_cast<Eigen::Index>(m)] = w;
        total += w;
      }
      if (total > kProbTol) {
        h /= total;
      } else {
        h.setZero();
        h[0] = 1.0;  // measure-zero branch: lowest message index
      }
      for (std::size_t m = 0; m < profile.num_messages; ++m) {
        const double hw = h[static_cast<Eigen::Index>(m)];
        if (hw <= 0.0) continue;
        const Transition d = fq_compose(profile.env.dist(tau, theta), profile.p[theta][m][tau]);
        for (std::size_t s = 0; s < ns; ++s) {
          for (std::size_t sp = 0; sp < ns; ++sp) {
            canon.g[theta][tau][s] += hw *
                                      d.matrix()(static_cast<Eigen::Index>(s),
                                                 static_cast<Eigen::Index>(sp)) *
                                      profile.g[m][tau][sp];
          }
        }
      }
    }
  }
  canon.validate();

  // Equivalence report.
  const auto scf0 = profile.social_choice_function();
  const auto scf1 = canon.social_choice_function();
  for (std::size_t theta = 0; theta < ntypes; ++theta) {
    out.report.scf_max_diff =
        std::max(out.report.scf_max_diff, (scf0[theta] - scf1[theta]).cwiseAbs().maxCoeff());
  }
  const auto played0 = profile.value_as_played();
  const auto dev0 = exhaustive_deviation_search(profile);
  const auto played1 = canon.value_as_played();
  const auto dev1 = exhaustive_deviation_search(canon);
  out.report.original_ic = true;
  out.report.canonical_ic = true;
  for (std::size_t theta = 0; theta < ntypes; ++theta) {
    out.report.original_slack =
        std::max(out.report.original_slack, dev0.best_value[theta] - played0[theta]);
    out.report.canonical_slack =
        std::max(out.report.canonical_slack, dev1.best_value[theta] - played1[theta]);
  }
  out.report.original_ic = out.report.original_slack <= ic_tol;
  out.report.canonical_ic = out.report.canonical_slack <= ic_tol;
  return out;
}

}  // namespace veritest
