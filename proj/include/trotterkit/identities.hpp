#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trotterkit/parallel.hpp"
#include "trotterkit/semigroup.hpp"

namespace trotterkit {

struct IdentityCheckResult {
  std::string name;
  double maxDeviation = 0.0;
  std::size_t instances = 0;
  double tolerance = 0.0;
  bool passed = true;
};

inline constexpr double kMatrixIdentityTolerance = 1e-10;
inline constexpr double kLiftIdentityTolerance = 1e-8;

/// 1e-10 on finite spaces, 1e-8 on Euclidean ones.
double identity_tolerance(const StateSpace& space);

/// Dirac at each state, the uniform measure, and three random probability
/// measures (finite spaces only).
std::vector<PositiveMeasure> identity_test_panel(const SpacePtr& space, std::uint64_t seed);

/// P1_h P2_{jh} - P2_{jh} P1_h against the sum over l < j of
/// P2_{lh} (P1_h P2_h - P2_h P1_h) P2_{(j-1-l)h}, with h = t/m.
IdentityCheckResult check_lemma_a(const Semigroup& g1, const Semigroup& g2, double t, std::size_t m,
                                  std::size_t j, const std::vector<PositiveMeasure>& tests);

/// P1_{kh} P2_{kh} - (P1_h P2_h)^k against the sum over 1 <= j < k of
/// P1_{jh} (P1_h P2_{jh} - P2_{jh} P1_h) P2_h (P1_h P2_h)^{k-1-j}.
/// k = 1 is accepted: both sides vanish.
IdentityCheckResult check_lemma_b(const Semigroup& g1, const Semigroup& g2, double t, std::size_t m,
                                  std::size_t k, const std::vector<PositiveMeasure>& tests);

/// (P1_{t/n} P2_{t/n})^n - (P1_h P2_h)^m, m = kn, against the telescoped sum
/// over i < n.
IdentityCheckResult check_lemma_c(const Semigroup& g1, const Semigroup& g2, double t, std::size_t n,
                                  std::size_t k, const std::vector<PositiveMeasure>& tests);

/// Triple sum with trailing factor P2_{(j-l)h} (P1_h P2_h)^{k(n-i)-j-1}.
IdentityCheckResult check_corollary(const Semigroup& g1, const Semigroup& g2, double t, std::size_t n,
                                    std::size_t k, const std::vector<PositiveMeasure>& tests);

/// The same triple sum obtained by substituting the single-step identity into
/// the k-step one and that into the n-block one, with every factor kept as it
/// arises: P2_{(j-1-l)h} P2_h (P1_h P2_h)^{k-1-j} (P1_h P2_h)^{k(n-1-i)}.
IdentityCheckResult check_corollary_recomposed(const Semigroup& g1, const Semigroup& g2, double t,
                                               std::size_t n, std::size_t k,
                                               const std::vector<PositiveMeasure>& tests);

/// Largest deviation between the two right-hand sides above; a discrepancy
/// here localizes to the trailing factor.
IdentityCheckResult corollary_displayed_vs_recomposed(const Semigroup& g1, const Semigroup& g2,
                                                      double t, std::size_t n, std::size_t k,
                                                      const std::vector<PositiveMeasure>& tests);

/// (P1_t P2_t)^n - (P2_t P1_t)^n against
///   [0] sum_i (P2_t P1_t)^{n-i-1} C (P1_t P2_t)^i
///   [1] sum_i (P1_t P2_t)^{n-i-1} C (P2_t P1_t)^i
/// with C = P1_t P2_t - P2_t P1_t.
std::array<IdentityCheckResult, 2> check_swap_identity(const Semigroup& g1, const Semigroup& g2,
                                                       double t, std::size_t n,
                                                       const std::vector<PositiveMeasure>& tests);

// ---------------------------------------------------------------------------
// Seeded suite

struct IdentityInstance {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::size_t states = 0;
  double t = 0.0;
  std::size_t n = 1;
  std::size_t k = 1;
  std::size_t j = 1;
  Eigen::MatrixXd dist;
  Eigen::MatrixXd Q1;
  Eigen::MatrixXd Q2;
};

/// Instance `trial` of the run seeded with `seed`: 2..maxStates states, a
/// random planar metric, two random generators, t in [0.1, 2], n, k in 1..8
/// and j in 1..kn.
IdentityInstance random_identity_instance(std::uint64_t seed, std::uint64_t trial,
                                          std::size_t max_states);

struct InstanceReport {
  IdentityInstance instance;
  std::vector<IdentityCheckResult> results;
  bool passed = true;
};

InstanceReport run_identity_instance(const IdentityInstance& inst);

std::vector<InstanceReport> run_identity_suite(std::uint64_t seed, std::size_t trials,
                                               std::size_t max_states,
                                               Execution exec = Execution::parallel);

}  // namespace trotterkit
