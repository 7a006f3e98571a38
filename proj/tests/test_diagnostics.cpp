#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "trotterkit/bl_metric.hpp"
#include "trotterkit/diagnostics.hpp"
#include "trotterkit/errors.hpp"
#include "trotterkit/random.hpp"

using namespace trotterkit;

namespace {

struct ThreeState {
  SpacePtr S;
  Semigroup g1, g2;
  PositiveMeasure mu0;
};

ThreeState three_state() {
  Eigen::MatrixXd d(3, 3), Q1(3, 3), Q2(3, 3);
  d << 0, 1, 2, 1, 0, 1.5, 2, 1.5, 0;
  Q1 << -1, 0.5, 0, 1, -1, 0.5, 0, 0.5, -0.5;
  Q2 << -0.3, 0, 2, 0, -1, 0, 0.3, 1, -2;
  const auto S = StateSpace::finite(d);
  return {S, Semigroup::generator(S, Q1), Semigroup::generator(S, Q2),
          PositiveMeasure(S, {{Point::state(0), 0.6}, {Point::state(1), 0.3}, {Point::state(2), 0.1}})};
}

bool nondecreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1]) return false;
  return true;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("perturbations hit their target distances") {
  const auto s = three_state();
  const std::vector<double> targets = {0.1, 0.01, 0.001, 0.0};
  const auto ps = perturb(s.mu0, targets, Metric::base(s.S), JitterKind::weight, 3);
  REQUIRE(ps.size() == targets.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(ps[i].inputDistance == doctest::Approx(targets[i]).epsilon(1e-6));
    CHECK(bl_distance(ps[i].nu, s.mu0) == doctest::Approx(ps[i].inputDistance).epsilon(1e-12));
    CHECK(ps[i].nu.total_mass() == doctest::Approx(s.mu0.total_mass()).epsilon(1e-12));
  }
  const auto R2 = StateSpace::euclidean(2);
  const PositiveMeasure cloud(R2, {{Point::at({0.0, 0.0}), 0.5}, {Point::at({1.0, 1.0}), 0.5}});
  const auto loc = perturb(cloud, {0.05, 0.005}, Metric::base(R2), JitterKind::location, 9);
  for (std::size_t i = 0; i < loc.size(); ++i) {
    CHECK(loc[i].kind == JitterKind::location);
    CHECK(loc[i].inputDistance == doctest::Approx(i == 0 ? 0.05 : 0.005).epsilon(1e-6));
  }
  CHECK_THROWS_AS(perturb(s.mu0, {0.1}, Metric::base(s.S), JitterKind::location, 1), InvalidArgument);
}

TEST_CASE("equicontinuity of the identity family is the identity on distances") {
  const auto s = three_state();
  const auto ps = perturb(s.mu0, {0.1, 0.03, 0.01, 0.001}, Metric::base(s.S), JitterKind::weight, 4);
  const auto probe = make_equicontinuity_probe(s.mu0, ps, {MarkovOperator::identity(s.S)}, Metric::base(s.S));
  const auto table = equicontinuity_modulus(probe);
  REQUIRE(table.input.size() == 4);
  for (std::size_t i = 0; i < table.input.size(); ++i) CHECK(table.output[i] == table.input[i]);
  CHECK(nondecreasing(table.input));
}

TEST_CASE("equicontinuity of a single stochastic matrix stays under a sanity envelope") {
  const auto S = StateSpace::uniform_finite(4, 2.0);
  Eigen::MatrixXd P(4, 4);
  P << 0.7, 0.1, 0.0, 0.2, 0.1, 0.6, 0.3, 0.0, 0.1, 0.2, 0.5, 0.3, 0.1, 0.1, 0.2, 0.5;
  const auto mu = PositiveMeasure::from_weights(S, Eigen::VectorXd::Constant(4, 0.25));
  const auto ps = perturb(mu, {0.2, 0.05, 0.01}, Metric::base(S), JitterKind::weight, 8);
  const auto probe =
      make_equicontinuity_probe(mu, ps, {MarkovOperator::stochastic_matrix(S, P)}, Metric::base(S));
  const auto table = equicontinuity_modulus(probe);
  for (std::size_t i = 0; i < table.input.size(); ++i) {
    CHECK(table.output[i] <= table.input[i] * (1.0 + 2.0 / 2.0) + 1e-12);
  }
  CHECK(nondecreasing(table.output));
}

TEST_CASE("equicontinuity of the Trotter family on the 3-state chain") {
  const auto s = three_state();
  const auto family = trotter_family(s.g1, s.g2, {0.25, 0.5, 1.0}, {1, 4, 16, 64});
  CHECK(family.size() == 12);
  const auto ps = perturb(s.mu0, {0.1, 0.01, 0.001, 1e-4}, Metric::base(s.S), JitterKind::weight, 5);
  const auto probe = make_equicontinuity_probe(s.mu0, ps, family, Metric::base(s.S));
  CHECK(probe.table.rows() == 4);
  CHECK(probe.table.cols() == 12);
  CHECK(probe.table.minCoeff() >= 0.0);
  const auto table = equicontinuity_modulus(probe);
  CHECK(nondecreasing(table.output));
  CHECK(table.output.front() <= 10.0 * table.input.front());
  CHECK(table.output.back() <= 2.0);
}

TEST_CASE("empty probes are rejected") {
  const auto s = three_state();
  CHECK_THROWS_AS(make_equicontinuity_probe(s.mu0, {}, {MarkovOperator::identity(s.S)}, Metric::base(s.S)),
                  InvalidArgument);
  const auto ps = perturb(s.mu0, {0.1}, Metric::base(s.S), JitterKind::weight, 5);
  CHECK_THROWS_AS(make_equicontinuity_probe(s.mu0, ps, {}, Metric::base(s.S)), InvalidArgument);
}

TEST_CASE("tightness") {
  SUBCASE("finite spaces are tight") {
    const auto s = three_state();
    const auto probe = tightness_probe(trotter_family(s.g1, s.g2, {1.0}, {1, 8}), s.mu0, {0.0, 1.0, 2.0});
    CHECK(probe.massOutside.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("translation family on a Dirac mass") {
    const auto R1 = StateSpace::euclidean(1);
    const auto tr = Semigroup::translation(R1, {1.0});
    std::vector<MarkovOperator> family;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) family.push_back(tr.at_time(t));
    const auto probe =
        tightness_probe(family, PositiveMeasure::dirac(R1, Point::at({0.0})), {0.0, 0.5, 1.0, 1.01, 2.0});
    CHECK(probe.center == Coords{0.0});
    for (Eigen::Index p = 0; p < probe.massOutside.rows(); ++p) {
      CHECK(probe.massOutside(p, 3) == 0.0);
      CHECK(probe.massOutside(p, 4) == 0.0);
    }
    CHECK(probe.massOutside(4, 1) == 1.0);
  }
  SUBCASE("contraction family on a 100-atom cloud") {
    const auto R2 = StateSpace::euclidean(2);
    std::mt19937_64 rng = trial_rng(100, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Atom> atoms;
    for (int i = 0; i < 100; ++i) atoms.push_back({Point::at({gauss(rng), gauss(rng)}), 0.01});
    const PositiveMeasure cloud(R2, atoms);
    const auto con = Semigroup::contraction(R2, 1.0);
    std::vector<MarkovOperator> family;
    for (double t : {0.0, 0.5, 1.0, 2.0}) family.push_back(con.at_time(t));
    const std::vector<double> radii = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    const auto probe = tightness_probe(family, cloud, radii);
    for (Eigen::Index p = 0; p < probe.massOutside.rows(); ++p) {
      for (Eigen::Index r = 1; r < probe.massOutside.cols(); ++r)
        CHECK(probe.massOutside(p, r) <= probe.massOutside(p, r - 1));
      CHECK(probe.massOutside(p, 0) <= 1.0 + 1e-12);
    }
    CHECK(probe.massOutside(0, 5) == 0.0);
  }
}

TEST_CASE("limit semigroup law") {
  SUBCASE("commuting generators") {
    auto s = three_state();
    Eigen::MatrixXd Q(3, 3);
    Q << -1, 1, 0, 0.5, -2, 1, 0.5, 1, -1;
    const auto c = limit_semigroup_check(Semigroup::generator(s.S, Q), Semigroup::generator(s.S, 2.0 * Q), s.mu0,
                                         0.5, 0.5, 64, Metric::base(s.S));
    CHECK(c.distPower <= 1e-9);
    CHECK(c.distAdditive <= 1e-9);
  }
  SUBCASE("3-state chain at 2^10") {
    const auto s = three_state();
    const auto c = limit_semigroup_check(s.g1, s.g2, s.mu0, 0.5, 0.5, 1024, Metric::base(s.S));
    CHECK(c.selfConvergence > 0.0);
    CHECK(c.distPower <= 5.0 * c.selfConvergence);
    CHECK(c.distAdditive <= 5.0 * c.selfConvergence);
    CHECK(c.sufficient);
  }
  SUBCASE("t = 0") {
    const auto s = three_state();
    CHECK(limit_semigroup_check(s.g1, s.g2, s.mu0, 0.0, 0.3, 16, Metric::base(s.S)).distAdditive == 0.0);
  }
}

TEST_CASE("Feller continuity") {
  const auto s = three_state();
  const std::vector<double> sizes = {1e-1, 1e-2, 1e-3, 1e-4};
  SUBCASE("3-state chain: row 0 is exact and the table decreases") {
    const auto t = feller_continuity_check(s.g1, s.g2, 1.0, s.mu0, sizes, 256, Metric::base(s.S), 42);
    REQUIRE(t.input.size() == 5);
    CHECK(t.input[0] == 0.0);
    CHECK(t.output[0] == 0.0);
    for (std::size_t i = 2; i < t.output.size(); ++i) CHECK(t.output[i] < t.output[i - 1]);
  }
  SUBCASE("identity semigroups reproduce the input distance") {
    const auto id = Semigroup::identity(s.S);
    const auto t = feller_continuity_check(id, id, 1.0, s.mu0, sizes, 4, Metric::base(s.S), 42);
    for (std::size_t i = 0; i < t.input.size(); ++i) CHECK(t.output[i] == doctest::Approx(t.input[i]).epsilon(1e-12));
  }
}

TEST_CASE("stochastic continuity") {
  SUBCASE("translation flow follows the Dirac formula") {
    const auto R1 = StateSpace::euclidean(1);
    const std::vector<double> h = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 0.0};
    const auto t = stochastic_continuity_check(Semigroup::translation(R1, {1.0}),
                                               PositiveMeasure::dirac(R1, Point::at({0.0})), h, Metric::base(R1));
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(std::abs(t.output[i] - testing::dirac_formula(h[i])) <= 1e-9);
    CHECK(t.output.back() == 0.0);
  }
  SUBCASE("generator: distance is about h times the norm of Q mu") {
    std::mt19937_64 rng = trial_rng(8, 0);
    const auto S = testing::random_space(4, rng);
    const Eigen::MatrixXd Q = random_generator(4, rng);
    const auto mu = PositiveMeasure::from_weights(S, random_probability(4, rng));
    const double c = bl_dual_norm(SignedMeasure::from_weights(S, Q * mu.dense())).value;
    const std::vector<double> h = {1e-2, 1e-3, 1e-4, 1e-5};
    const auto t = stochastic_continuity_check(Semigroup::generator(S, Q), mu, h, Metric::base(S));
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(t.output[i] / h[i] == doctest::Approx(c).epsilon(2e-2));
    CHECK(t.output[3] / h[3] == doctest::Approx(c).epsilon(1e-4));
  }
}

TEST_CASE("dirac distance") {
  CHECK(dirac_distance(1.0) == doctest::Approx(2.0 / 3.0));
  CHECK(dirac_distance(0.0) == 0.0);
}

}  // TEST_SUITE
