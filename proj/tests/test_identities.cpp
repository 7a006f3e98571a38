#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "trotterkit/identities.hpp"
#include "trotterkit/random.hpp"

using namespace trotterkit;

namespace {

struct Pair {
  SpacePtr S;
  Semigroup g1, g2;
  std::vector<PositiveMeasure> tests;
};

Pair random_pair(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng = trial_rng(seed, 0);
  const auto S = testing::random_space(m, rng);
  auto g1 = Semigroup::generator(S, random_generator(m, rng));
  auto g2 = Semigroup::generator(S, random_generator(m, rng));
  return {S, g1, g2, identity_test_panel(S, seed)};
}

Pair commuting_pair() {
  std::mt19937_64 rng = trial_rng(5, 0);
  const auto S = testing::random_space(4, rng);
  const Eigen::MatrixXd Q = random_generator(4, rng);
  return {S, Semigroup::generator(S, Q), Semigroup::generator(S, 2.0 * Q), identity_test_panel(S, 5)};
}

Pair linear_flows() {
  const auto R2 = StateSpace::euclidean(2);
  Eigen::MatrixXd A(2, 2), B(2, 2);
  A << 0, -1, 1, 0;
  B << -0.5, 0.2, 0, -0.1;
  std::vector<PositiveMeasure> tests = {
      PositiveMeasure::dirac(R2, Point::at({1.0, 0.0})),
      PositiveMeasure(R2, {{Point::at({0.5, -1.0}), 0.3}, {Point::at({-2.0, 0.25}), 0.7}})};
  return {R2, Semigroup::linear_flow(R2, A), Semigroup::linear_flow(R2, B), tests};
}

void check_pass(const IdentityCheckResult& r) {
  INFO(r.name << " deviation " << r.maxDeviation);
  CHECK(r.passed);
  CHECK(r.maxDeviation <= r.tolerance);
  CHECK(r.maxDeviation >= 0.0);
}

}  // namespace

TEST_SUITE("identities") {

TEST_CASE("test panel: Diracs, uniform and three random measures") {
  const auto p = random_pair(5, 1);
  CHECK(p.tests.size() == 5 + 1 + 3);
  for (const auto& mu : p.tests) CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("tolerances") {
  CHECK(identity_tolerance(*StateSpace::uniform_finite(3)) == kMatrixIdentityTolerance);
  CHECK(identity_tolerance(*StateSpace::euclidean(2)) == kLiftIdentityTolerance);
}

TEST_CASE("single-step identity") {
  const auto p = random_pair(4, 11);
  const auto base = check_lemma_a(p.g1, p.g2, 1.0, 6, 1, p.tests);
  CHECK(base.maxDeviation <= 1e-15);
  check_pass(check_lemma_a(p.g1, p.g2, 1.0, 6, 3, p.tests));
  const auto c = commuting_pair();
  check_pass(check_lemma_a(c.g1, c.g2, 1.0, 6, 4, c.tests));
  CHECK(check_lemma_a(p.g1, p.g2, 1.0, 6, 3, p.tests).instances == p.tests.size());
  CHECK_THROWS(check_lemma_a(p.g1, p.g2, 1.0, 6, 7, p.tests));
}

TEST_CASE("k-step identity") {
  const auto p = random_pair(4, 12);
  check_pass(check_lemma_b(p.g1, p.g2, 1.0, 8, 2, p.tests));
  check_pass(check_lemma_b(p.g1, p.g2, 1.0, 8, 4, p.tests));
  check_pass(check_lemma_b(p.g1, p.g2, 1.0, 8, 1, p.tests));
  const auto c = commuting_pair();
  check_pass(check_lemma_b(c.g1, c.g2, 1.0, 8, 3, c.tests));
  CHECK_THROWS(check_lemma_b(p.g1, p.g2, 1.0, 3, 4, p.tests));
}

TEST_CASE("n-block identity") {
  const auto p = random_pair(4, 13);
  check_pass(check_lemma_c(p.g1, p.g2, 1.0, 3, 2, p.tests));
  check_pass(check_lemma_c(p.g1, p.g2, 1.0, 1, 3, p.tests));
  check_pass(check_lemma_c(p.g1, p.g2, 1.0, 4, 1, p.tests));
  const auto c = commuting_pair();
  check_pass(check_lemma_c(c.g1, c.g2, 1.0, 2, 2, c.tests));
}

TEST_CASE("triple-sum corollary as displayed and recomposed") {
  const auto p = random_pair(3, 14);
  check_pass(check_corollary(p.g1, p.g2, 1.0, 2, 3, p.tests));
  check_pass(check_corollary_recomposed(p.g1, p.g2, 1.0, 2, 3, p.tests));
  check_pass(corollary_displayed_vs_recomposed(p.g1, p.g2, 1.0, 2, 3, p.tests));
  check_pass(check_corollary(p.g1, p.g2, 1.0, 3, 1, p.tests));
  const auto c = commuting_pair();
  check_pass(check_corollary(c.g1, c.g2, 1.0, 2, 2, c.tests));
}

TEST_CASE("order-swap expansion") {
  const auto p = random_pair(4, 15);
  for (std::size_t n : {1u, 5u}) {
    const auto both = check_swap_identity(p.g1, p.g2, 0.4, n, p.tests);
    check_pass(both[0]);
    check_pass(both[1]);
    CHECK(both[0].name != both[1].name);
  }
  const auto c = commuting_pair();
  for (const auto& r : check_swap_identity(c.g1, c.g2, 0.4, 3, c.tests)) check_pass(r);
}

TEST_CASE("identities on linear-flow lifts use the lift tolerance") {
  const auto lf = linear_flows();
  const auto a = check_lemma_a(lf.g1, lf.g2, 1.0, 4, 3, lf.tests);
  CHECK(a.tolerance == kLiftIdentityTolerance);
  check_pass(a);
  check_pass(check_lemma_b(lf.g1, lf.g2, 1.0, 6, 3, lf.tests));
  check_pass(check_lemma_c(lf.g1, lf.g2, 1.0, 2, 3, lf.tests));
  check_pass(check_corollary(lf.g1, lf.g2, 1.0, 2, 2, lf.tests));
  for (const auto& r : check_swap_identity(lf.g1, lf.g2, 0.5, 3, lf.tests)) check_pass(r);
}

TEST_CASE("dense matrix oracle for the single-step identity") {
  std::mt19937_64 rng = trial_rng(21, 0);
  const Eigen::MatrixXd Q1 = random_generator(4, rng), Q2 = random_generator(4, rng);
  const double h = 1.0 / 6.0;
  const std::size_t j = 3;
  auto E = [](const Eigen::MatrixXd& Q, double s) { return testing::expm_reference(s * Q); };
  const Eigen::MatrixXd lhs = E(Q1, h) * E(Q2, j * h) - E(Q2, j * h) * E(Q1, h);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(4, 4);
  const Eigen::MatrixXd C = E(Q1, h) * E(Q2, h) - E(Q2, h) * E(Q1, h);
  for (std::size_t l = 0; l < j; ++l) rhs += E(Q2, l * h) * C * E(Q2, (j - 1 - l) * h);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("seeded suite") {
  const auto a = run_identity_suite(42, 50, 4);
  REQUIRE(a.size() == 50);
  for (const auto& r : a) {
    CHECK(r.passed);
    CHECK(r.instance.states >= 2);
    CHECK(r.instance.states <= 4);
    CHECK(r.instance.n >= 1);
    CHECK(r.instance.n <= 8);
    CHECK(r.instance.k <= 8);
    CHECK(r.instance.j >= 1);
    CHECK(r.instance.j <= r.instance.n * r.instance.k);
    CHECK(r.results.size() == 8);
  }
  const auto b = run_identity_suite(42, 50, 4, Execution::serial);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t c = 0; c < a[i].results.size(); ++c)
      CHECK(a[i].results[c].maxDeviation == b[i].results[c].maxDeviation);
  const auto replay = run_identity_instance(random_identity_instance(42, 17, 4));
  for (std::size_t c = 0; c < replay.results.size(); ++c)
    CHECK(replay.results[c].maxDeviation == a[17].results[c].maxDeviation);
}

}  // TEST_SUITE
