#include "veritest/finite_markov.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <random>

using namespace veritest;

TEST_CASE("measure basics") {
  const Measure b = Measure::bernoulli(0.7);
  CHECK(b.top_mass() == doctest::Approx(0.7));
  CHECK(b.cdf(0) == doctest::Approx(0.3));
  CHECK(b.cdf(1) == doctest::Approx(1.0));
  CHECK_THROWS(Measure::bernoulli(1.5));
  CHECK_THROWS(Measure(ScoreSet::binary(), Vec::Constant(2, 0.6)));
}

TEST_CASE("push through constant transition yields the target measure") {
  const ScoreSet s({1.0, 2.0, 3.0});
  std::mt19937 rng(7);
  const Measure mu = testutil::random_measure(rng, s);
  const Measure nu = testutil::random_measure(rng, s);
  const Measure out = push(mu, Transition::constant(s, nu));
  CHECK((out.weights() - nu.weights()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("blend interpolates transitions") {
  const ScoreSet s = ScoreSet::binary();
  const Transition id = Transition::identity(s);
  const Transition k = Transition::constant(s, Measure::bernoulli(0.5));
  const Transition mix = blend(0.25, id, k);
  CHECK(mix.matrix()(1, 1) == doctest::Approx(0.25 * 1.0 + 0.75 * 0.5));
}

TEST_CASE("fosd on binary measures compares top mass") {
  CHECK(fosd_geq(Measure::bernoulli(0.7), Measure::bernoulli(0.4)));
  CHECK_FALSE(fosd_geq(Measure::bernoulli(0.4), Measure::bernoulli(0.7)));
  CHECK(fosd_geq(Measure::bernoulli(0.4), Measure::bernoulli(0.4)));
}

TEST_CASE("quantile cell edge conventions") {
  // Top score with zero mass: p = 1 still maps to the top cell.
  Vec cdf(2);
  cdf << 1.0, 1.0;
  CHECK(quantile_cell(cdf, 1.0) == 1);
  CHECK(quantile_cell(cdf, 0.0) == 0);
  CHECK(quantile_cell(cdf, 0.5) == 0);
  Vec cdf2(3);
  cdf2 << 0.2, 0.6, 1.0;
  CHECK(quantile_cell(cdf2, 0.2) == 0);
  CHECK(quantile_cell(cdf2, 0.2 + 1e-9) == 1);
  CHECK(quantile_cell(cdf2, 0.9) == 2);
}

TEST_CASE("binary quantile-matching transition matches the split formulas") {
  SUBCASE("source passes more") {
    const Measure tau = Measure::bernoulli(0.7);
    const Measure psi = Measure::bernoulli(0.5);
    const Transition k = fq_compose(tau, psi);
    CHECK(k.matrix()(0, 0) == doctest::Approx(1.0));
    CHECK(k.matrix()(1, 1) == doctest::Approx(0.5 / 0.7));
    const Measure out = push(tau, k);
    CHECK(out.top_mass() == doctest::Approx(0.5));
  }
  SUBCASE("source passes less") {
    const Measure tau = Measure::bernoulli(0.3);
    const Measure psi = Measure::bernoulli(0.6);
    const Transition k = fq_compose(tau, psi);
    CHECK(k.matrix()(1, 1) == doctest::Approx(1.0));
    CHECK(k.matrix()(0, 0) == doctest::Approx(0.4 / 0.7));
    CHECK(push(tau, k).top_mass() == doctest::Approx(0.6));
  }
}

TEST_CASE("worked quantile-matching example") {
  const Measure mu(ScoreSet::binary(), (Vec(2) << 0.3, 0.7).finished());
  const Measure nu(ScoreSet::binary(), (Vec(2) << 0.5, 0.5).finished());
  const Transition k = fq_compose(mu, nu);
  CHECK(k.matrix()(0, 0) == doctest::Approx(1.0));
  CHECK(k.matrix()(0, 1) == doctest::Approx(0.0));
  CHECK(k.matrix()(1, 1) == doctest::Approx(5.0 / 7.0));
  const Measure out = push(mu, k);
  CHECK(out.weights()[0] == doctest::Approx(0.5));
  CHECK(out.weights()[1] == doctest::Approx(0.5));
}

TEST_CASE("pushforward identities on random instances") {
  std::mt19937 rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const ScoreSet s = testutil::random_scoreset(rng);
    const ScoreSet t = testutil::random_scoreset(rng);
    const Measure mu = testutil::random_measure(rng, s);
    const Measure nu = testutil::random_measure(rng, t);

    // mu composed with its own distribution transition is uniform on [0,1].
    CHECK(is_uniform01(push_through_distribution(mu)));

    // mu F~_mu Q~_nu = nu, both via the finite composition and symbolically.
    const Transition k = fq_compose(mu, nu);
    const Measure out = push(mu, k);
    CHECK((out.weights() - nu.weights()).cwiseAbs().maxCoeff() < 1e-12);
    const Measure out2 =
        push_through_quantile(push_through_distribution(mu), quantile_transition(nu));
    CHECK((out2.weights() - nu.weights()).cwiseAbs().maxCoeff() < 1e-12);

    const Transition k2 = compose(distribution_transition(mu), quantile_transition(nu));
    CHECK((k2.matrix() - k.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("dominance is equivalent to a downward quantile-matching transition") {
  std::mt19937 rng(13);
  for (int rep = 0; rep < 200; ++rep) {
    const ScoreSet s = testutil::random_scoreset(rng);
    const Measure mu = testutil::random_measure(rng, s);
    const Measure nu = testutil::random_measure(rng, s);
    CHECK(fosd_geq(mu, nu) == is_downward(fq_compose(mu, nu)));
    const Measure dominated = testutil::random_dominated(rng, mu);
    CHECK(fosd_geq(mu, dominated));
    CHECK(is_downward(fq_compose(mu, dominated)));
  }
}

TEST_CASE("monotone transitions preserve dominance and compose") {
  std::mt19937 rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const ScoreSet s = testutil::random_scoreset(rng);
    const ScoreSet t = testutil::random_scoreset(rng);
    const ScoreSet u = testutil::random_scoreset(rng);
    const Transition k1 = testutil::random_monotone(rng, s, t);
    const Transition k2 = testutil::random_monotone(rng, t, u);
    CHECK(is_monotone(k1));
    CHECK(is_monotone(k2));
    CHECK(is_monotone(compose(k1, k2)));

    const Measure mu = testutil::random_measure(rng, s);
    const Measure nu = testutil::random_dominated(rng, mu);
    CHECK(fosd_geq(push(mu, k1), push(nu, k1)));
  }
}

TEST_CASE("transition validation rejects bad rows") {
  const ScoreSet s = ScoreSet::binary();
  Mat bad(2, 2);
  bad << 0.5, 0.6, 1.0, 0.0;
  CHECK_THROWS(Transition(s, s, bad));
  CHECK_THROWS(ScoreSet({1.0, 1.0}));
  CHECK_THROWS(ScoreSet({2.0, 1.0}));
}
