#include <cmath>
#include <map>

#include "doctest.h"
#include "support.hpp"
#include "trotterkit/errors.hpp"
#include "trotterkit/measure.hpp"
#include "trotterkit/random.hpp"

using namespace trotterkit;

namespace {

SpacePtr line3() {
  Eigen::MatrixXd d(3, 3);
  d << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  return StateSpace::finite(d);
}

}  // namespace

TEST_SUITE("measures") {

TEST_CASE("tv_norm of simple measures") {
  const auto S = line3();
  CHECK(tv_norm(PositiveMeasure::dirac(S, Point::state(0))) == 1.0);
  const auto mu = SignedMeasure::from_atoms(S, {{Point::state(0), 2.0}, {Point::state(1), -1.0}});
  CHECK(tv_norm(mu) == 3.0);
  CHECK(mu.positive().total_mass() == 2.0);
  CHECK(mu.negative().total_mass() == 1.0);
  CHECK(tv_norm(SignedMeasure::zero(S)) == 0.0);
}

TEST_CASE("tv_norm matches an atom-merging oracle on random 10-atom measures") {
  std::mt19937_64 rng = trial_rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto S = testing::random_space(6, rng);
    std::vector<Atom> atoms;
    std::map<std::size_t, double> merged;
    for (int i = 0; i < 10; ++i) {
      const std::size_t s = uniform_count(rng, 0, 5);
      const double w = uniform(rng, -2.0, 2.0);
      atoms.push_back({Point::state(s), w});
      merged[s] += w;
    }
    double oracle = 0.0;
    for (const auto& [s, w] : merged) oracle += std::abs(w);
    CHECK(tv_norm(SignedMeasure::from_atoms(S, atoms)) == doctest::Approx(oracle).epsilon(1e-14));
  }
}

TEST_CASE("normalize_atoms merges and cancels") {
  const auto S = line3();
  const Point x = Point::state(1);
  CHECK(SignedMeasure::from_atoms(S, {{x, 1.0}, {x, -1.0}}).is_zero());

  const auto two = SignedMeasure::from_atoms(S, {{x, 1.0}, {x, 1.0}});
  REQUIRE(two.signed_atoms().size() == 1);
  CHECK(two.signed_atoms()[0].weight == 2.0);

  const auto merged = SignedMeasure::from_atoms(S, {{x, 1.0}, {x, -0.25}});
  REQUIRE(merged.signed_atoms().size() == 1);
  CHECK(merged.signed_atoms()[0].point.index == 1);
  CHECK(merged.signed_atoms()[0].weight == 0.75);
}

TEST_CASE("normalize_atoms on a raw overlapping pair") {
  const auto S = line3();
  const auto pos = PositiveMeasure(S, {{Point::state(0), 1.0}, {Point::state(1), 0.5}});
  const auto neg = PositiveMeasure(S, {{Point::state(1), 0.75}});
  const SignedMeasure raw(pos, neg);
  CHECK_FALSE(raw.normalized());
  const auto n = normalize_atoms(raw);
  CHECK(n.normalized());
  CHECK(tv_norm(n) == doctest::Approx(1.25));
  CHECK(tv_norm(n) <= tv_norm(raw) + 1e-15);
  // pos and neg share no location after normalization
  for (const auto& a : n.positive().atoms())
    for (const auto& b : n.negative().atoms()) CHECK(a.point.index != b.point.index);
}

TEST_CASE("normalize_atoms is idempotent") {
  std::mt19937_64 rng = trial_rng(3, 0);
  const auto S = testing::random_space(5, rng);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mu = testing::random_signed(S, 8, rng);
    const auto again = normalize_atoms(mu);
    const auto a = mu.signed_atoms();
    const auto b = again.signed_atoms();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].point.index == b[i].point.index);
      CHECK(a[i].weight == b[i].weight);
    }
  }
}

TEST_CASE("sub-tolerance atoms are pruned") {
  const auto S = line3();
  const auto mu = SignedMeasure::from_atoms(S, {{Point::state(0), 1.0}, {Point::state(2), 1e-14}});
  CHECK(mu.signed_atoms().size() == 1);
  const auto kept = SignedMeasure::from_atoms(S, {{Point::state(0), 1.0}, {Point::state(2), 1e-11}});
  CHECK(kept.signed_atoms().size() == 2);
}

TEST_CASE("euclidean coincidence merges points closer than the tolerance") {
  const auto R2 = StateSpace::euclidean(2);
  const auto mu = SignedMeasure::from_atoms(
      R2, {{Point::at({1.0, 2.0}), 1.0}, {Point::at({1.0 + 1e-13, 2.0}), 0.5}, {Point::at({1.0, 2.1}), 0.25}});
  CHECK(mu.signed_atoms().size() == 2);
  CHECK(tv_norm(mu) == doctest::Approx(1.75));
}

TEST_CASE("linear_combine") {
  const auto S = line3();
  std::mt19937_64 rng = trial_rng(5, 0);
  const auto mu = testing::random_signed(S, 4, rng);
  const auto nu = testing::random_signed(S, 4, rng);

  const std::vector<double> c10 = {1.0, 0.0};
  const std::vector<SignedMeasure> mn = {mu, nu};
  const auto same = linear_combine(c10, mn);
  CHECK((same.dense() - mu.dense()).cwiseAbs().maxCoeff() == 0.0);

  const std::vector<double> cancel = {1.0, -1.0};
  const std::vector<SignedMeasure> mm = {mu, mu};
  CHECK(linear_combine(cancel, mm).is_zero());

  const std::vector<double> half = {0.5, 0.5};
  const std::vector<SignedMeasure> xy = {SignedMeasure(PositiveMeasure::dirac(S, Point::state(0))),
                                         SignedMeasure(PositiveMeasure::dirac(S, Point::state(2)))};
  const auto mix = linear_combine(half, xy).signed_atoms();
  REQUIRE(mix.size() == 2);
  CHECK(mix[0].point.index == 0);
  CHECK(mix[0].weight == 0.5);
  CHECK(mix[1].point.index == 2);
  CHECK(mix[1].weight == 0.5);
}

TEST_CASE("linear_combine rejects measures on different spaces") {
  const auto S = line3();
  const auto T = line3();
  const std::vector<double> c = {1.0, 1.0};
  const std::vector<SignedMeasure> ms = {SignedMeasure(PositiveMeasure::dirac(S, Point::state(0))),
                                         SignedMeasure(PositiveMeasure::dirac(T, Point::state(0)))};
  if (!same_space(S, T)) {
    CHECK_THROWS_AS(linear_combine(c, ms), SpaceMismatch);
  }
  const auto R1 = StateSpace::euclidean(1);
  const std::vector<SignedMeasure> mixed = {SignedMeasure(PositiveMeasure::dirac(S, Point::state(0))),
                                            SignedMeasure(PositiveMeasure::dirac(R1, Point::at({0.0})))};
  CHECK_THROWS_AS(linear_combine(c, mixed), SpaceMismatch);
}

TEST_CASE("tv_norm triangle inequality on random triples") {
  std::mt19937_64 rng = trial_rng(17, 0);
  const auto S = testing::random_space(6, rng);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = testing::random_signed(S, 5, rng);
    const auto b = testing::random_signed(S, 5, rng);
    CHECK(tv_norm(difference(a, b.negated())) <= tv_norm(a) + tv_norm(b) + 1e-14);
  }
}

TEST_CASE("positive measures: tv equals the sum of weights") {
  const auto S = line3();
  const PositiveMeasure mu(S, {{Point::state(0), 0.2}, {Point::state(1), 0.3}, {Point::state(2), 0.5}});
  CHECK(tv_norm(mu) == 0.2 + 0.3 + 0.5);
  CHECK(tv_norm(SignedMeasure(mu)) == tv_norm(mu));
  CHECK_THROWS_AS(PositiveMeasure(S, {{Point::state(0), -0.1}}), InvalidArgument);
  CHECK_THROWS_AS(PositiveMeasure(S, {{Point::state(3), 0.1}}), InvalidArgument);
}

TEST_CASE("finite spaces reject non-metric distance matrices") {
  std::mt19937_64 rng = trial_rng(23, 0);
  int rejected = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) d(i, j) = d(j, i) = uniform(rng, 0.1, 5.0);
    bool metric = true;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          if (d(i, k) > d(i, j) + d(j, k)) metric = false;
    CHECK(metric == metric_violation(d).empty());
    if (metric) {
      CHECK_NOTHROW(StateSpace::finite(d));
    } else {
      ++rejected;
      CHECK_THROWS_AS(StateSpace::finite(d), InvalidArgument);
    }
  }
  CHECK(rejected > 0);

  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(StateSpace::finite(asym), InvalidArgument);
  Eigen::MatrixXd zero_off(2, 2);
  zero_off << 0, 0, 0, 0;
  CHECK_THROWS_AS(StateSpace::finite(zero_off), InvalidArgument);
  Eigen::MatrixXd triangle(3, 3);
  triangle << 0, 1, 5, 1, 0, 1, 5, 1, 0;
  CHECK_THROWS_AS(StateSpace::finite(triangle), InvalidArgument);
}

}  // TEST_SUITE
