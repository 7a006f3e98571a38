#include <cmath>
#include <numeric>

#include "doctest.h"
#include "support.hpp"
#include "trotterkit/bl_metric.hpp"
#include "trotterkit/errors.hpp"
#include "trotterkit/random.hpp"
#include "trotterkit/splitting.hpp"

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

ThreeState commuting() {
  ThreeState c = three_state();
  Eigen::MatrixXd Q(3, 3);
  Q << -1, 1, 0, 0.5, -2, 1, 0.5, 1, -1;
  c.g1 = Semigroup::generator(c.S, Q);
  c.g2 = Semigroup::generator(c.S, 2.0 * Q);
  return c;
}

SplittingStudy study_of(const ThreeState& s, std::vector<std::size_t> schedule, double t = 1.0) {
  return SplittingStudy{s.g1, s.g2, s.mu0, t, std::move(schedule), Order::g1_first, Metric::base(s.S)};
}

TestFunction witness(const SpacePtr& S, std::vector<double> values) {
  LipschitzWitness w;
  for (std::size_t i = 0; i < values.size(); ++i) w.points.push_back(Point::state(i));
  w.values = std::move(values);
  w.supBound = 0.0;
  for (double v : w.values) w.supBound = std::max(w.supBound, std::abs(v));
  w.lipBound = 0.0;
  for (std::size_t i = 0; i < w.values.size(); ++i)
    for (std::size_t j = i + 1; j < w.values.size(); ++j)
      w.lipBound = std::max(w.lipBound, std::abs(w.values[i] - w.values[j]) / S->dist()(i, j));
  return TestFunction::from_witness(S, w, "f");
}

struct LinearFlow {
  SpacePtr R2 = StateSpace::euclidean(2);
  Eigen::MatrixXd A, B;
  Eigen::Vector2d x{1.0, 0.0};
  LinearFlow() : A(2, 2), B(2, 2) {
    A << 0, -1, 1, 0;
    B << -0.5, 0, 0, -0.1;
  }
  Semigroup g1() const { return Semigroup::linear_flow(R2, A); }
  Semigroup g2() const { return Semigroup::linear_flow(R2, B); }
  PositiveMeasure mu0() const { return PositiveMeasure::dirac(R2, Point::at({x(0), x(1)})); }
};

}  // namespace

TEST_SUITE("splitting") {

TEST_CASE("schedules") {
  CHECK(dyadic_schedule(3) == std::vector<std::size_t>{1, 2, 4, 8});
  CHECK(linear_schedule(4) == std::vector<std::size_t>{1, 2, 3, 4});
}

TEST_CASE("study validation") {
  const auto s = three_state();
  CHECK_NOTHROW(validate(study_of(s, {1, 2, 4})));
  CHECK_THROWS_AS(validate(study_of(s, {1, 4, 2})), InvalidArgument);
  CHECK_THROWS_AS(validate(study_of(s, {})), InvalidArgument);
  CHECK_THROWS_AS(validate(study_of(s, {1, 2}, -1.0)), InvalidArgument);
  CHECK_THROWS_AS(estimate_limit(study_of(s, {1, 2})), InvalidArgument);
}

TEST_CASE("iterate with an identity second factor is the first semigroup") {
  const auto s = three_state();
  const auto id = Semigroup::identity(s.S);
  const auto exact = s.g1.at_time(1.3).apply(s.mu0);
  for (std::size_t n : {1u, 3u, 16u}) {
    CHECK(bl_distance(trotter_iterate(s.g1, id, 1.3, n, s.mu0), exact) <= 1e-12);
  }
}

TEST_CASE("composition convention: the second factor acts first") {
  const auto s = three_state();
  const Eigen::VectorXd oracle = testing::expm_reference(s.g1.matrix()) *
                                 (testing::expm_reference(s.g2.matrix()) * s.mu0.dense());
  CHECK((trotter_iterate(s.g1, s.g2, 1.0, 1, s.mu0).dense() - oracle).cwiseAbs().maxCoeff() <= 1e-13);
  const Eigen::VectorXd swapped = testing::expm_reference(s.g2.matrix()) *
                                  (testing::expm_reference(s.g1.matrix()) * s.mu0.dense());
  CHECK((trotter_iterate(s.g1, s.g2, 1.0, 1, s.mu0, Order::g2_first).dense() - swapped).cwiseAbs().maxCoeff() <=
        1e-13);
}

TEST_CASE("commuting generators give the exact limit for every n") {
  const auto c = commuting();
  const auto exact = exact_limit(c.g1, c.g2, 1.0, c.mu0);
  REQUIRE(exact.has_value());
  const Eigen::VectorXd oracle = testing::expm_reference(c.g1.matrix() + c.g2.matrix()) * c.mu0.dense();
  CHECK((exact->dense() - oracle).cwiseAbs().maxCoeff() <= 1e-13);
  for (std::size_t n : {1u, 2u, 7u, 64u, 1024u}) {
    CHECK(bl_distance(trotter_iterate(c.g1, c.g2, 1.0, n, c.mu0), *exact) <= 1e-9);
  }
}

TEST_CASE("noncommuting 3-state iterate at n = 64 is within O(1/n) of the limit") {
  const auto s = three_state();
  const auto exact = exact_limit(s.g1, s.g2, 1.0, s.mu0);
  REQUIRE(exact.has_value());
  const double d32 = bl_distance(trotter_iterate(s.g1, s.g2, 1.0, 32, s.mu0), *exact);
  const double d64 = bl_distance(trotter_iterate(s.g1, s.g2, 1.0, 64, s.mu0), *exact);
  CHECK(d64 > 0.0);
  CHECK(d64 * 64 == doctest::Approx(d32 * 32).epsilon(0.05));
  CHECK(d64 < 1e-2);
}

TEST_CASE("TV is preserved along the scheme") {
  const auto s = three_state();
  for (std::size_t n : {1u, 5u, 100u}) {
    CHECK(std::abs(tv_norm(trotter_iterate(s.g1, s.g2, 2.0, n, s.mu0)) - tv_norm(s.mu0)) <= 1e-10);
  }
}

TEST_CASE("dyadic sequence") {
  const auto s = three_state();
  const auto f = witness(s.S, {0.3, -0.2, 0.1});
  SUBCASE("t = 0 is constant") {
    const auto r = dyadic_sequence(study_of(s, dyadic_schedule(5), 0.0), f);
    for (double v : r) CHECK(v == doctest::Approx(pairing(s.mu0, f)).epsilon(1e-15));
  }
  SUBCASE("commuting case is constant") {
    const auto c = commuting();
    const auto r = dyadic_sequence(study_of(c, dyadic_schedule(6)), f);
    for (double v : r) CHECK(v == doctest::Approx(r.front()).epsilon(1e-12));
  }
  SUBCASE("noncommuting differences shrink and respect the modulus bound") {
    const auto study = study_of(s, dyadic_schedule(8));
    const auto r = dyadic_sequence(study, f);
    REQUIRE(r.size() == 9);
    for (std::size_t k = 2; k + 1 < r.size(); ++k) {
      CHECK(std::abs(r[k + 1] - r[k]) < std::abs(r[k] - r[k - 1]));
    }
    const auto grid = modulus_grid(1.0, {}, 12);
    const auto omega = commutator_modulus(s.g1, s.g2, s.mu0, grid, Metric::base(s.S));
    const auto C = extended_commutator_constant(s.g1, s.g2, s.mu0, grid,
                                                sample_extended_family(1.0, 16, 8, 42), Metric::base(s.S));
    std::vector<unsigned> exps(r.size());
    std::iota(exps.begin(), exps.end(), 0u);
    for (const auto& c : dyadic_cauchy_check(r, exps, C.value, omega, 1.0)) CHECK(c.ok);
  }
  SUBCASE("non-dyadic schedules are rejected") {
    CHECK_THROWS_AS(dyadic_sequence(study_of(s, {1, 2, 3}), f), InvalidArgument);
  }
}

TEST_CASE("estimate_limit") {
  SUBCASE("commuting case saturates") {
    const auto c = commuting();
    const auto est = estimate_limit(study_of(c, dyadic_schedule(6)));
    CHECK(est.report.reference == "exact");
    CHECK(est.report.saturated);
    for (double d : est.report.distances) CHECK(d <= 1e-9);
  }
  SUBCASE("random 4-state generators converge at first order") {
    for (std::uint64_t trial = 0; trial < 3; ++trial) {
      std::mt19937_64 rng = trial_rng(314, trial);
      const auto S = testing::random_space(4, rng);
      const auto g1 = Semigroup::generator(S, random_generator(4, rng));
      const auto g2 = Semigroup::generator(S, random_generator(4, rng));
      const auto mu0 = PositiveMeasure::from_weights(S, random_probability(4, rng));
      const auto est =
          estimate_limit(SplittingStudy{g1, g2, mu0, 1.0, dyadic_schedule(10), Order::g1_first, Metric::base(S)});
      CHECK_FALSE(est.report.saturated);
      CHECK(est.report.fittedRate >= 0.8);
      CHECK(est.report.fittedRate <= 1.2);
    }
  }
  SUBCASE("linear flows match the Dirac formula against a matrix oracle") {
    const LinearFlow lf;
    const auto est = estimate_limit(
        SplittingStudy{lf.g1(), lf.g2(), lf.mu0(), 1.0, dyadic_schedule(8), Order::g1_first, Metric::base(lf.R2)});
    CHECK(est.report.reference == "exact");
    const Eigen::Vector2d z = testing::expm_reference(lf.A + lf.B) * lf.x;
    for (std::size_t p = 0; p < est.report.schedule.size(); ++p) {
      const auto n = est.report.schedule[p];
      const double h = 1.0 / static_cast<double>(n);
      const Eigen::MatrixXd step = testing::expm_reference(h * lf.A) * testing::expm_reference(h * lf.B);
      Eigen::Vector2d y = lf.x;
      for (std::size_t i = 0; i < n; ++i) y = step * y;
      const double e = (y - z).norm();
      CHECK(est.report.distances[p] == doctest::Approx(testing::dirac_formula(e)).epsilon(1e-8));
    }
  }
}

TEST_CASE("log-log rate fit") {
  const std::vector<std::size_t> n = {1, 2, 4, 8, 16, 32};
  std::vector<double> d;
  for (auto v : n) d.push_back(3.0 / static_cast<double>(v));
  const RateFit fit = fit_loglog_rate(n, d);
  CHECK(fit.rate == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.points == 3);
  CHECK_FALSE(fit.saturated);
  const RateFit sat = fit_loglog_rate(n, std::vector<double>(6, 1e-12));
  CHECK(sat.saturated);
}

TEST_CASE("commutator modulus") {
  SUBCASE("commuting semigroups") {
    const auto c = commuting();
    const auto om = commutator_modulus(c.g1, c.g2, c.mu0, modulus_grid(1.0, {}, 8), Metric::base(c.S));
    for (double v : om.values) CHECK(v == 0.0);
    CHECK(om.diniIntegral == 0.0);
  }
  SUBCASE("identity second factor") {
    const auto S2 = StateSpace::uniform_finite(2);
    Eigen::MatrixXd Q(2, 2);
    Q << -1, 1, 1, -1;
    const auto mu = PositiveMeasure(S2, {{Point::state(0), 0.7}, {Point::state(1), 0.3}});
    const auto om = commutator_modulus(Semigroup::generator(S2, Q), Semigroup::generator(S2, Eigen::MatrixXd::Zero(2, 2)),
                                       mu, modulus_grid(1.0, {}, 6), Metric::base(S2));
    for (double v : om.values) CHECK(v == 0.0);
  }
  SUBCASE("linear flows: omega is linear in t with the matrix-oracle constant") {
    const LinearFlow lf;
    const auto grid = modulus_grid(1.0, {}, 14);
    const auto om = commutator_modulus(lf.g1(), lf.g2(), lf.mu0(), grid, Metric::base(lf.R2));
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double s = grid[p];
      const Eigen::MatrixXd eA = testing::expm_reference(s * lf.A), eB = testing::expm_reference(s * lf.B);
      const double e = (eA * eB * lf.x - eB * eA * lf.x).norm();
      CHECK(om.values[p] == doctest::Approx(testing::dirac_formula(e) / s).epsilon(1e-7));
    }
    const Eigen::MatrixXd comm = lf.A * lf.B - lf.B * lf.A;
    const double c = (comm * lf.x).norm();
    CHECK(om.values.back() / om.tGrid.back() == doctest::Approx(c).epsilon(1e-3));
    CHECK(std::isfinite(om.diniIntegral));
    for (std::size_t p = 0; p + 1 < grid.size(); ++p) {
      CHECK(om.monotoneEnvelope[p] >= om.monotoneEnvelope[p + 1]);
      CHECK(om.monotoneEnvelope[p] >= om.values[p]);
    }
  }
  SUBCASE("zero in the grid is rejected") {
    const auto s = three_state();
    CHECK_THROWS_AS(commutator_modulus(s.g1, s.g2, s.mu0, {1.0, 0.5, 0.0}, Metric::base(s.S)), InvalidArgument);
  }
}

TEST_CASE("extended commutator constant") {
  const auto grid = modulus_grid(1.0, {}, 8);
  SUBCASE("commuting case is 1") {
    const auto c = commuting();
    const auto C = extended_commutator_constant(c.g1, c.g2, c.mu0, grid, sample_extended_family(1.0, 8, 4, 1),
                                                Metric::base(c.S));
    CHECK(C.value == 1.0);
    CHECK(C.violations.empty());
  }
  SUBCASE("identity member gives ratio 1") {
    const auto s = three_state();
    const auto C = extended_commutator_constant(s.g1, s.g2, s.mu0, grid, {FamilyMember{}}, Metric::base(s.S));
    CHECK(C.value == 1.0);
    CHECK(C.sampleSize == 1);
  }
  SUBCASE("3-state sample of 20 operators") {
    const auto s = three_state();
    const auto fam = sample_extended_family(1.0, 20, 8, 7);
    CHECK(fam.size() == 21);
    const auto C = extended_commutator_constant(s.g1, s.g2, s.mu0, grid, fam, Metric::base(s.S));
    CHECK(std::isfinite(C.value));
    CHECK(C.value >= 1.0);
    CHECK_FALSE(C.sampleDescription.empty());
  }
  SUBCASE("family samples are reproducible") {
    const auto a = sample_extended_family(0.5, 10, 4, 99);
    const auto b = sample_extended_family(0.5, 10, 4, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].describe() == b[i].describe());
  }
}

TEST_CASE("refinement bound check") {
  const auto s = three_state();
  const auto f = witness(s.S, {0.3, -0.2, 0.1});
  const auto grid = modulus_grid(1.0, {1, 2, 3, 4, 6, 8, 12, 16}, 12);
  SUBCASE("k = 1 gives zero on both sides") {
    const auto om = commutator_modulus(s.g1, s.g2, s.mu0, grid, Metric::base(s.S));
    for (const auto& b : refinement_bound_check(s.g1, s.g2, s.mu0, f, 1.0, {{1, 1}, {4, 1}}, 2.0, om)) {
      CHECK(b.lhs == 0.0);
      CHECK(b.rhs == 0.0);
      CHECK(b.ok);
    }
  }
  SUBCASE("commuting case has zero left-hand side") {
    const auto c = commuting();
    const auto om = commutator_modulus(c.g1, c.g2, c.mu0, grid, Metric::base(c.S));
    for (const auto& b : refinement_bound_check(c.g1, c.g2, c.mu0, f, 1.0, {{1, 2}, {2, 3}, {4, 4}}, 1.0, om)) {
      CHECK(b.lhs <= 1e-13);
      CHECK(b.ok);
    }
  }
  SUBCASE("3-state pairs satisfy the bound") {
    const auto om = commutator_modulus(s.g1, s.g2, s.mu0, grid, Metric::base(s.S));
    const auto C = extended_commutator_constant(s.g1, s.g2, s.mu0, grid, sample_extended_family(1.0, 20, 8, 3),
                                                Metric::base(s.S));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t n : {1u, 2u, 4u})
      for (std::size_t k : {2u, 3u, 4u}) pairs.emplace_back(n, k);
    for (const auto& b : refinement_bound_check(s.g1, s.g2, s.mu0, f, 1.0, pairs, C.value, om)) {
      CHECK(b.lhs > 0.0);
      CHECK(b.lhs <= b.rhs);
      CHECK(b.ok);
    }
  }
  SUBCASE("grid range violation") {
    const auto om = commutator_modulus(s.g1, s.g2, s.mu0, modulus_grid(1.0, {}, 2), Metric::base(s.S));
    CHECK_THROWS_AS(refinement_bound_check(s.g1, s.g2, s.mu0, f, 1.0, {{4, 4}}, 1.0, om), InvalidArgument);
  }
}

TEST_CASE("order swap") {
  SUBCASE("commuting case") {
    CHECK(swap_order_limit_distance(study_of(commuting(), dyadic_schedule(6))) <= 1e-9);
  }
  SUBCASE("n = 1 is the commutator at t") {
    const auto s = three_state();
    const auto om = commutator_modulus(s.g1, s.g2, s.mu0, {1.0}, Metric::base(s.S));
    CHECK(swap_order_limit_distance(study_of(s, {1})) == doctest::Approx(om.values[0] * 1.0).epsilon(1e-12));
  }
  SUBCASE("3-state at n = 2^10") {
    const auto study = study_of(three_state(), dyadic_schedule(10));
    const double swap = swap_order_limit_distance(study);
    SplittingStudy swapped = study;
    swapped.order = Order::g2_first;
    const double self = std::min(self_convergence_distance(study, 1024), self_convergence_distance(swapped, 1024));
    CHECK(swap > 0.0);
    CHECK(swap <= 10.0 * self);
  }
}

TEST_CASE("Dini machinery") {
  SUBCASE("linear modulus") {
    const auto grid = modulus_grid(1.0, {}, 20);
    const auto om = make_modulus(grid, grid);
    const DiniResult r = dini_integral(om, 0.5, 1.0);
    CHECK(r.depth == 20);
    CHECK(r.integral == doctest::Approx(1.0 - std::pow(0.5, 20)).epsilon(1e-12));
    CHECK(r.tailSum == doctest::Approx(1.0 - std::pow(0.5, 20)).epsilon(1e-12));
    CHECK(r.tailBounded);
  }
  SUBCASE("zero modulus") {
    const auto grid = modulus_grid(1.0, {}, 10);
    const DiniResult r = dini_integral(make_modulus(grid, std::vector<double>(grid.size(), 0.0)), 0.5, 1.0);
    CHECK(r.integral == 0.0);
    CHECK(r.tailSum == 0.0);
  }
  SUBCASE("measured linear-flow modulus") {
    const LinearFlow lf;
    const auto om = commutator_modulus(lf.g1(), lf.g2(), lf.mu0(), modulus_grid(1.0, {}, 16), Metric::base(lf.R2));
    const DiniResult r = dini_integral(om, 0.5, 1.0);
    CHECK(r.tailSum > 0.0);
    CHECK(r.tailSum <= r.integral / 0.5);
    CHECK(r.tailBounded);
  }
  SUBCASE("coverage failure") {
    const auto grid = modulus_grid(0.5, {}, 4);
    CHECK_THROWS_AS(dini_integral(make_modulus(grid, grid), 0.5, 1.0), InvalidArgument);
  }
}

TEST_CASE("envelope lookup uses the smallest grid point at or above s") {
  const auto om = make_modulus({1.0, 0.5, 0.25}, {0.3, 0.1, 0.2});
  CHECK(om.monotoneEnvelope == std::vector<double>{0.3, 0.2, 0.2});
  CHECK(om.envelope_at(0.25) == 0.2);
  CHECK(om.envelope_at(0.3) == 0.2);
  CHECK(om.envelope_at(0.75) == 0.3);
  CHECK_THROWS_AS(om.envelope_at(0.1), InvalidArgument);
  CHECK_THROWS_AS(om.envelope_at(2.0), InvalidArgument);
}

TEST_CASE("full study on the 3-state chain") {
  const auto s = three_state();
  const std::vector<TestFunction> panel = {witness(s.S, {0.3, -0.2, 0.1}), witness(s.S, {-0.1, 0.1, 0.3})};
  StudyConfig cfg;
  cfg.familySample = 16;
  const auto res = run_splitting_study(study_of(s, dyadic_schedule(8)), panel, cfg);
  CHECK(res.estimate.report.violations.empty());
  CHECK(res.dyadic);
  REQUIRE(res.witnesses.size() == 2);
  for (const auto& w : res.witnesses) {
    for (const auto& b : w.bounds) CHECK(b.ok);
    for (const auto& c : w.cauchy) CHECK(c.ok);
    CHECK(w.dini.tailBounded);
  }
  CHECK(res.estimate.report.fittedRate == doctest::Approx(1.0).epsilon(0.2));
}

}  // TEST_SUITE
