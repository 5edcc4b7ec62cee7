// Finite-set algebra of probability measures and Markov transitions on an
// ordered score set. Measures are row vectors, transitions row-stochastic
// matrices, and composition is the matrix product. The unit-interval
// distribution/quantile transitions are kept symbolic (CDF breakpoints) so
// that the algebraic identities relating them hold exactly.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace veritest {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Absolute tolerance for probability comparisons throughout the algebra.
inline constexpr double kProbTol = 1e-12;

// Strictly increasing finite list of real score labels.
class ScoreSet {
 public:
  explicit ScoreSet(std::vector<double> scores);

  static ScoreSet binary();  // {0, 1}

  std::size_t size() const { return scores_.size(); }
  double score(std::size_t i) const { return scores_[i]; }
  const std::vector<double>& scores() const { return scores_; }

  bool operator==(const ScoreSet& other) const { return scores_ == other.scores_; }
  bool operator!=(const ScoreSet& other) const { return !(*this == other); }

 private:
  std::vector<double> scores_;
};

// Probability measure on a ScoreSet.
class Measure {
 public:
  Measure(ScoreSet scoreset, Vec weights);

  static Measure point_mass(ScoreSet scoreset, std::size_t index);
  // Measure on {0,1} with mass p on the top score.
  static Measure bernoulli(double p);

  const ScoreSet& scoreset() const { return scoreset_; }
  const Vec& weights() const { return weights_; }
  std::size_t size() const { return scoreset_.size(); }

  // F at the i-th score: total mass on scores <= score(i).
  double cdf(std::size_t i) const;
  // Binary shorthand: mass on the top score.
  double top_mass() const { return weights_[weights_.size() - 1]; }

 private:
  ScoreSet scoreset_;
  Vec weights_;
};

// Markov transition between two ScoreSets; rows indexed by source scores.
class Transition {
 public:
  Transition(ScoreSet source, ScoreSet target, Mat rows);

  static Transition identity(ScoreSet scoreset);
  // Maps every source score to the same measure nu.
  static Transition constant(ScoreSet source, const Measure& nu);

  const ScoreSet& source() const { return source_; }
  const ScoreSet& target() const { return target_; }
  const Mat& matrix() const { return rows_; }
  Measure row(std::size_t i) const;

 private:
  ScoreSet source_, target_;
  Mat rows_;
};

Measure push(const Measure& mu, const Transition& k);
Transition compose(const Transition& a, const Transition& b);

// Convex combination lambda * a + (1 - lambda) * b.
Transition blend(double lambda, const Transition& a, const Transition& b);

// First-order stochastic dominance: mu >=_SD nu.
bool fosd_geq(const Measure& mu, const Measure& nu, double tol = kProbTol);

// Consecutive rows FOSD-ordered upward (sufficient for all pairs).
bool is_monotone(const Transition& k, double tol = kProbTol);

// Each row s puts mass 1 on scores <= s.
bool is_downward(const Transition& d, double tol = kProbTol);

// Symbolic transition between a ScoreSet and the unit interval.
//
// Distribution kind: score s_i maps to the uniform distribution on
// [F(s_{i-1}), F(s_i)] (a point mass when the interval is degenerate).
// Quantile kind: p in (F(s_{j-1}), F(s_j)] maps to the point mass at s_j,
// p = 0 maps to the bottom score, and p = 1 maps to the top score even when
// the top score has zero mass.
struct UnitIntervalTransition {
  enum class Kind { kDistribution, kQuantile };
  Kind kind;
  ScoreSet scoreset;
  Vec cdf;  // cumulative weights of the underlying measure; cdf[n-1] = 1
};

UnitIntervalTransition distribution_transition(const Measure& mu);
UnitIntervalTransition quantile_transition(const Measure& mu);

// Index of the quantile cell of p under the stored CDF (with the edge
// conventions above).
std::size_t quantile_cell(const Vec& cdf, double p);

// The exact finite composition F~_mu Q~_nu.
Transition fq_compose(const Measure& mu, const Measure& nu);
// Same composition, starting from the symbolic halves.
Transition compose(const UnitIntervalTransition& f, const UnitIntervalTransition& q);

// Measure on [0,1] that is piecewise uniform with possible atoms (segments
// with lo == hi). Used to state the pushforward identities exactly.
struct PiecewiseUniform {
  struct Segment {
    double lo, hi, mass;
  };
  std::vector<Segment> segments;
};

// The pushforward mu F~_mu.
PiecewiseUniform push_through_distribution(const Measure& mu);
bool is_uniform01(const PiecewiseUniform& m, double tol = kProbTol);
// Pushforward of a unit-interval measure through a quantile transition.
Measure push_through_quantile(const PiecewiseUniform& m, const UnitIntervalTransition& q);

}  // namespace veritest
