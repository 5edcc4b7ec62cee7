#include "veritest/finite_markov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace veritest {

ScoreSet::ScoreSet(std::vector<double> scores) : scores_(std::move(scores)) {
  if (scores_.empty()) throw std::invalid_argument("ScoreSet: empty");
  for (std::size_t i = 1; i < scores_.size(); ++i) {
    if (!(scores_[i] > scores_[i - 1])) {
      throw std::invalid_argument("ScoreSet: scores must be strictly increasing");
    }
  }
}

ScoreSet ScoreSet::binary() { return ScoreSet({0.0, 1.0}); }

Measure::Measure(ScoreSet scoreset, Vec weights)
    : scoreset_(std::move(scoreset)), weights_(std::move(weights)) {
  if (static_cast<std::size_t>(weights_.size()) != scoreset_.size()) {
    throw std::invalid_argument("Measure: weight/score size mismatch");
  }
  if ((weights_.array() < -kProbTol).any()) {
    throw std::invalid_argument("Measure: negative weight");
  }
  if (std::abs(weights_.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("Measure: weights must sum to 1");
  }
}

Measure Measure::point_mass(ScoreSet scoreset, std::size_t index) {
  if (index >= scoreset.size()) throw std::invalid_argument("Measure: index out of range");
  Vec w = Vec::Zero(static_cast<Eigen::Index>(scoreset.size()));
  w[static_cast<Eigen::Index>(index)] = 1.0;
  return Measure(std::move(scoreset), std::move(w));
}

Measure Measure::bernoulli(double p) {
  if (p < -kProbTol || p > 1.0 + kProbTol) {
    throw std::invalid_argument("Measure: pass probability outside [0,1]");
  }
  p = std::clamp(p, 0.0, 1.0);
  Vec w(2);
  w << 1.0 - p, p;
  return Measure(ScoreSet::binary(), std::move(w));
}

double Measure::cdf(std::size_t i) const {
  return weights_.head(static_cast<Eigen::Index>(i) + 1).sum();
}

Transition::Transition(ScoreSet source, ScoreSet target, Mat rows)
    : source_(std::move(source)), target_(std::move(target)), rows_(std::move(rows)) {
  if (rows_.rows() != static_cast<Eigen::Index>(source_.size()) ||
      rows_.cols() != static_cast<Eigen::Index>(target_.size())) {
    throw std::invalid_argument("Transition: matrix shape mismatch");
  }
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    if ((rows_.row(i).array() < -kProbTol).any() ||
        std::abs(rows_.row(i).sum() - 1.0) > 1e-9) {
      throw std::invalid_argument("Transition: row is not a probability measure");
    }
  }
}

Transition Transition::identity(ScoreSet scoreset) {
  const auto n = static_cast<Eigen::Index>(scoreset.size());
  return Transition(scoreset, scoreset, Mat::Identity(n, n));
}

Transition Transition::constant(ScoreSet source, const Measure& nu) {
  const auto n = static_cast<Eigen::Index>(source.size());
  Mat rows(n, nu.weights().size());
  rows.rowwise() = nu.weights().transpose();
  return Transition(std::move(source), nu.scoreset(), std::move(rows));
}

Measure Transition::row(std::size_t i) const {
  return Measure(target_, rows_.row(static_cast<Eigen::Index>(i)).transpose());
}

Measure push(const Measure& mu, const Transition& k) {
  if (mu.scoreset() != k.source()) throw std::invalid_argument("push: score-set mismatch");
  Vec w = (mu.weights().transpose() * k.matrix()).transpose();
  // Guard tiny negative round-off before revalidation.
  w = w.cwiseMax(0.0);
  return Measure(k.target(), std::move(w));
}

Transition compose(const Transition& a, const Transition& b) {
  if (a.target() != b.source()) throw std::invalid_argument("compose: score-set mismatch");
  return Transition(a.source(), b.target(), a.matrix() * b.matrix());
}

Transition blend(double lambda, const Transition& a, const Transition& b) {
  if (a.source() != b.source() || a.target() != b.target()) {
    throw std::invalid_argument("blend: score-set mismatch");
  }
  return Transition(a.source(), a.target(),
                    lambda * a.matrix() + (1.0 - lambda) * b.matrix());
}

bool fosd_geq(const Measure& mu, const Measure& nu, double tol) {
  if (mu.scoreset() != nu.scoreset()) throw std::invalid_argument("fosd_geq: score-set mismatch");
  double fm = 0.0, fn = 0.0;
  for (Eigen::Index i = 0; i < mu.weights().size(); ++i) {
    fm += mu.weights()[i];
    fn += nu.weights()[i];
    if (fm > fn + tol) return false;
  }
  return true;
}

bool is_monotone(const Transition& k, double tol) {
  for (std::size_t i = 0; i + 1 < k.source().size(); ++i) {
    if (!fosd_geq(k.row(i + 1), k.row(i), tol)) return false;
  }
  return true;
}

bool is_downward(const Transition& d, double tol) {
  if (d.source() != d.target()) throw std::invalid_argument("is_downward: source != target");
  for (Eigen::Index i = 0; i < d.matrix().rows(); ++i) {
    if (d.matrix().row(i).head(i + 1).sum() < 1.0 - tol) return false;
  }
  return true;
}

namespace {

Vec cumulative(const Measure& mu) {
  Vec cdf(mu.weights().size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mu.weights().size(); ++i) {
    acc += mu.weights()[i];
    cdf[i] = acc;
  }
  cdf[cdf.size() - 1] = 1.0;
  return cdf;
}

}  // namespace

UnitIntervalTransition distribution_transition(const Measure& mu) {
  return {UnitIntervalTransition::Kind::kDistribution, mu.scoreset(), cumulative(mu)};
}

UnitIntervalTransition quantile_transition(const Measure& mu) {
  return {UnitIntervalTransition::Kind::kQuantile, mu.scoreset(), cumulative(mu)};
}

std::size_t quantile_cell(const Vec& cdf, double p) {
  const auto n = static_cast<std::size_t>(cdf.size());
  if (p >= 1.0) return n - 1;  // 1 maps to the top score even with zero top mass
  if (p <= 0.0) return 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (cdf[static_cast<Eigen::Index>(j)] >= p) return j;
  }
  return n - 1;
}

Transition fq_compose(const Measure& mu, const Measure& nu) {
  const Vec fm = cumulative(mu);
  const Vec fn = cumulative(nu);
  const auto n = static_cast<Eigen::Index>(mu.size());
  const auto m = static_cast<Eigen::Index>(nu.size());
  Mat rows = Mat::Zero(n, m);
  double lo = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double hi = fm[i];
    if (hi - lo > kProbTol) {
      // Uniform on [lo, hi] split across the quantile cells of nu.
      double cell_lo = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        const double cell_hi = (j + 1 == m) ? 1.0 : fn[j];
        const double overlap =
            std::max(0.0, std::min(cell_hi, hi) - std::max(cell_lo, lo));
        rows(i, j) = overlap / (hi - lo);
        cell_lo = cell_hi;
      }
      // Round-off: make the row sum exactly 1 on the largest entry.
      Eigen::Index jmax;
      rows.row(i).maxCoeff(&jmax);
      rows(i, jmax) += 1.0 - rows.row(i).sum();
    } else {
      // Zero-mass source score: point mass at the quantile of F(s_i).
      rows(i, static_cast<Eigen::Index>(quantile_cell(fn, hi))) = 1.0;
    }
    lo = hi;
  }
  return Transition(mu.scoreset(), nu.scoreset(), std::move(rows));
}

Transition compose(const UnitIntervalTransition& f, const UnitIntervalTransition& q) {
  if (f.kind != UnitIntervalTransition::Kind::kDistribution ||
      q.kind != UnitIntervalTransition::Kind::kQuantile) {
    throw std::invalid_argument("compose: expected distribution then quantile transition");
  }
  Vec wf(f.cdf.size()), wq(q.cdf.size());
  double prev = 0.0;
  for (Eigen::Index i = 0; i < f.cdf.size(); ++i) {
    wf[i] = f.cdf[i] - prev;
    prev = f.cdf[i];
  }
  prev = 0.0;
  for (Eigen::Index i = 0; i < q.cdf.size(); ++i) {
    wq[i] = q.cdf[i] - prev;
    prev = q.cdf[i];
  }
  return fq_compose(Measure(f.scoreset, wf.cwiseMax(0.0)),
                    Measure(q.scoreset, wq.cwiseMax(0.0)));
}

PiecewiseUniform push_through_distribution(const Measure& mu) {
  PiecewiseUniform out;
  double lo = 0.0;
  for (Eigen::Index i = 0; i < mu.weights().size(); ++i) {
    const double hi = (i + 1 == mu.weights().size()) ? 1.0 : lo + mu.weights()[i];
    out.segments.push_back({lo, std::max(lo, hi), mu.weights()[i]});
    lo = std::max(lo, hi);
  }
  return out;
}

bool is_uniform01(const PiecewiseUniform& m, double tol) {
  // Uniform iff every segment with positive mass has density 1 and atoms
  // carry no mass.
  double total = 0.0;
  for (const auto& seg : m.segments) {
    total += seg.mass;
    const double len = seg.hi - seg.lo;
    if (len <= tol) {
      if (seg.mass > tol) return false;
    } else if (std::abs(seg.mass / len - 1.0) > 1e-9) {
      return false;
    }
  }
  return std::abs(total - 1.0) <= tol;
}

Measure push_through_quantile(const PiecewiseUniform& m, const UnitIntervalTransition& q) {
  if (q.kind != UnitIntervalTransition::Kind::kQuantile) {
    throw std::invalid_argument("push_through_quantile: wrong transition kind");
  }
  const auto n = static_cast<Eigen::Index>(q.scoreset.size());
  Vec w = Vec::Zero(n);
  for (const auto& seg : m.segments) {
    if (seg.mass <= 0.0) continue;
    if (seg.hi - seg.lo <= kProbTol) {
      w[static_cast<Eigen::Index>(quantile_cell(q.cdf, seg.lo))] += seg.mass;
      continue;
    }
    double cell_lo = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double cell_hi = (j + 1 == n) ? 1.0 : q.cdf[j];
      const double overlap =
          std::max(0.0, std::min(cell_hi, seg.hi) - std::max(cell_lo, seg.lo));
      w[j] += seg.mass * overlap / (seg.hi - seg.lo);
      cell_lo = cell_hi;
    }
  }
  Eigen::Index jmax;
  w.maxCoeff(&jmax);
  w[jmax] += 1.0 - w.sum();
  return Measure(q.scoreset, std::move(w));
}

}  // namespace veritest
