#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trotterkit/bl_metric.hpp"
#include "trotterkit/parallel.hpp"
#include "trotterkit/semigroup.hpp"

namespace trotterkit {

/// g1_first is the composition P1 o P2: within each block P2 acts on the
/// measure first, then P1. g2_first swaps the roles.
enum class Order { g1_first, g2_first };

struct SplittingStudy {
  Semigroup g1;
  Semigroup g2;
  PositiveMeasure mu0;
  double t = 1.0;
  std::vector<std::size_t> schedule;
  Order order = Order::g1_first;
  Metric metric;
};

/// Checks the study's structural invariants (t >= 0, schedule nonempty and
/// strictly increasing, spaces consistent).
void validate(const SplittingStudy& study);

/// n = 2^0, ..., 2^K.
std::vector<std::size_t> dyadic_schedule(unsigned K);
/// n = 1, ..., N.
std::vector<std::size_t> linear_schedule(std::size_t N);

/// [P1_{t/n} P2_{t/n}]^n mu (or the swapped product for g2_first).
PositiveMeasure trotter_iterate(const Semigroup& g1, const Semigroup& g2, double t, std::size_t n,
                                const PositiveMeasure& mu, Order order = Order::g1_first);

/// Exact limit when both semigroups are generators (e^{t(Q1+Q2)}) or both
/// are linear flows (pushforward by e^{t(A+B)}); nullopt otherwise.
std::optional<PositiveMeasure> exact_limit(const Semigroup& g1, const Semigroup& g2, double t,
                                           const PositiveMeasure& mu);

/// Commutator modulus estimate on a decreasing time grid.
struct ModulusEstimate {
  std::vector<double> tGrid;             // strictly decreasing, positive
  std::vector<double> values;            // ||P1_s P2_s mu - P2_s P1_s mu||* / s
  std::vector<double> monotoneEnvelope;  // running max from small s upward
  double diniIntegral = 0.0;             // trapezoid of values(s)/s over the grid

  /// Envelope value at s, taken at the smallest grid point >= s (an upper
  /// bound for the nondecreasing envelope). Throws InvalidArgument outside
  /// the grid range.
  double envelope_at(double s) const;
  double min_time() const { return tGrid.back(); }
  double max_time() const { return tGrid.front(); }
};

/// Commutator norms at or below this (times max(1, tv(mu0))) are floating
/// point noise and are recorded as exactly zero.
inline constexpr double kCommutatorNoiseFloor = 1e-13;

/// Builds a ModulusEstimate from externally supplied values (used for
/// synthetic moduli and by commutator_modulus itself).
ModulusEstimate make_modulus(std::vector<double> tGrid, std::vector<double> values);

ModulusEstimate commutator_modulus(const Semigroup& g1, const Semigroup& g2,
                                   const PositiveMeasure& mu0, const std::vector<double>& tGrid,
                                   const Metric& metric, Execution exec = Execution::parallel);

/// t * q^{-1} for every q in `divisors`, plus t / 2^p for p = 0..depth,
/// sorted decreasing and deduplicated.
std::vector<double> modulus_grid(double t, const std::vector<std::size_t>& divisors, unsigned depth);

/// One member of P2(delta) . F(delta) . P1(delta):
///   P2_a [P1_{s/r} P2_{s/r}]^r P1_b   (r = 0 means the middle factor is the identity).
struct FamilyMember {
  double a = 0.0;
  double s = 0.0;
  std::size_t r = 0;
  double b = 0.0;
  std::string describe() const;
};

PositiveMeasure apply_member(const Semigroup& g1, const Semigroup& g2, const FamilyMember& m,
                             const PositiveMeasure& mu);

/// Identity plus `count` members drawn uniformly (a, s, b in [0, delta],
/// r in 1..r_max) from a seeded generator.
std::vector<FamilyMember> sample_extended_family(double delta, std::size_t count, std::size_t r_max,
                                                 std::uint64_t seed);

struct CommutatorConstant {
  double value = 1.0;
  std::size_t sampleSize = 0;
  std::string sampleDescription;
  /// Sampled (member, t) where the modulus at mu0 vanishes but not at P mu0.
  std::vector<std::string> violations;
};

/// C = max over sampled P and grid t of omega(t, P mu0) / omega(t, mu0),
/// with 0/0 counted as 1.
CommutatorConstant extended_commutator_constant(const Semigroup& g1, const Semigroup& g2,
                                                const PositiveMeasure& mu0,
                                                const std::vector<double>& tGrid,
                                                const std::vector<FamilyMember>& family,
                                                const Metric& metric,
                                                Execution exec = Execution::parallel);

/// Absolute slack granted to bound comparisons for floating-point noise.
inline constexpr double kBoundSlack = 1e-12;

struct BoundComparison {
  std::size_t n = 0;
  std::size_t k = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
};

/// lhs = |<[P1_{t/n}P2_{t/n}]^n mu0 - [P1_{t/nk}P2_{t/nk}]^{nk} mu0, f>|,
/// rhs = C (k - 1)/2 t omega_env(t/(nk)).
std::vector<BoundComparison> refinement_bound_check(
    const Semigroup& g1, const Semigroup& g2, const PositiveMeasure& mu0, const TestFunction& f,
    double t, const std::vector<std::pair<std::size_t, std::size_t>>& pairs, double C,
    const ModulusEstimate& omega, Execution exec = Execution::parallel);

/// r_k = <[P1_{t/2^k} P2_{t/2^k}]^{2^k} mu0, f> for every (power-of-two)
/// schedule entry 2^k.
std::vector<double> dyadic_sequence(const SplittingStudy& study, const TestFunction& f,
                                    Execution exec = Execution::parallel);

struct CauchyCheck {
  unsigned i = 0;
  unsigned j = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
};

/// |r_i - r_j| <= C (t/2) sum_{l=j}^{i-1} omega_env(t / 2^{l+1}) for every
/// pair of exponents in `exponents` (r[p] belongs to exponent exponents[p]).
std::vector<CauchyCheck> dyadic_cauchy_check(const std::vector<double>& r,
                                             const std::vector<unsigned>& exponents, double C,
                                             const ModulusEstimate& omega, double t);

struct RateFit {
  double rate = 0.0;
  bool saturated = false;
  std::size_t points = 0;
};

/// Least squares slope of log(distance) vs log(n) over the last ceil(half)
/// of the entries; rate = -slope. Saturated when every distance in the
/// window is <= 1e-9.
RateFit fit_loglog_rate(const std::vector<std::size_t>& schedule,
                        const std::vector<double>& distances);

inline constexpr double kSaturationLevel = 1e-9;

struct ConvergenceReport {
  std::vector<std::size_t> schedule;
  std::vector<double> distances;
  std::string reference;  // "exact" or "finest_iterate"
  double fittedRate = 0.0;
  bool saturated = false;
  std::size_t fitPoints = 0;
  std::vector<BoundComparison> boundComparisons;
  std::vector<double> cauchyDiffs;
  std::vector<std::string> violations;
};

struct LimitEstimate {
  PositiveMeasure limit;
  ConvergenceReport report;
};

/// Finest iterate plus the distance table against the best available
/// reference. Needs at least three schedule entries.
LimitEstimate estimate_limit(const SplittingStudy& study, Execution exec = Execution::parallel);

/// ||finest g1-first iterate - finest g2-first iterate||*.
double swap_order_limit_distance(const SplittingStudy& study);

/// ||iterate(n) - iterate(n/2)||* (n >= 2).
double self_convergence_distance(const SplittingStudy& study, std::size_t n);

struct DiniResult {
  double integral = 0.0;
  double tailSum = 0.0;
  unsigned depth = 0;
  bool tailBounded = true;  // tailSum <= integral / (1 - a)
};

/// Quadrature of omega_env(s)/s over [a^L t, t] and sum_{n=1}^{L} omega_env(a^n t),
/// L the deepest level inside the grid.
DiniResult dini_integral(const ModulusEstimate& omega, double a, double t);

/// Finite truncation of the family U2_s U1_s' [U2_{tau/n} U1_{tau/n}]^n f
/// for n <= nMax and s, s', tau on a uniform grid over [0, delta].
struct EnvelopeTruncation {
  double delta = 1.0;
  std::size_t nMax = 4;
  std::size_t grid = 3;
  std::string describe() const;
};

/// Finite spaces only; f must be defined on every state.
std::vector<LipschitzWitness> truncated_envelope_family(const Semigroup& g1, const Semigroup& g2,
                                                        const LipschitzWitness& f,
                                                        const EnvelopeTruncation& trunc);

// ---------------------------------------------------------------------------
// Full study

struct StudyConfig {
  std::vector<std::size_t> refinementN = {1, 2, 4, 8};
  std::vector<std::size_t> refinementK = {2, 3, 4};
  std::size_t familySample = 64;
  std::size_t familyRMax = 16;
  std::uint64_t seed = 42;
  double diniRatio = 0.5;
  unsigned gridDepth = 12;
  Execution exec = Execution::parallel;
};

struct WitnessOutcome {
  std::string label;
  std::string metric;
  std::vector<BoundComparison> bounds;
  /// Per schedule entry: k -> (lhs, rhs) of the refinement bound at that n.
  std::vector<std::vector<BoundComparison>> perEntry;
  std::vector<double> dyadic;
  std::vector<CauchyCheck> cauchy;
  ModulusEstimate modulus;
  CommutatorConstant constant;
  DiniResult dini;
};

struct StudyResult {
  LimitEstimate estimate;
  std::vector<WitnessOutcome> witnesses;
  double swapDistance = 0.0;
  double selfConvergence = 0.0;
  bool dyadic = false;
};

/// Metric used for the witness f (base metric, or an envelope built from f).
using MetricForWitness = std::function<Metric(const TestFunction&)>;

StudyResult run_splitting_study(const SplittingStudy& study, const std::vector<TestFunction>& witnesses,
                                const StudyConfig& config, const MetricForWitness& metric_for = {});

}  // namespace trotterkit
