#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "trotterkit/state_space.hpp"

namespace trotterkit {

/// Atoms whose |weight| falls below this fraction of the measure's total
/// variation are dropped during normalization.
inline constexpr double kPruneTolerance = 1e-12;

struct Atom {
  Point point;
  double weight = 0.0;
};

/// A finitely supported positive measure. Always stored normalized: atoms are
/// sorted, coincident atoms merged, and sub-tolerance atoms pruned.
class PositiveMeasure {
 public:
  /// Throws InvalidArgument on a negative or non-finite weight or a point
  /// that does not belong to `space`.
  PositiveMeasure(SpacePtr space, std::vector<Atom> atoms);

  static PositiveMeasure zero(SpacePtr space);
  static PositiveMeasure dirac(SpacePtr space, Point x, double weight = 1.0);
  /// Finite spaces only: atom i carries weights[i].
  static PositiveMeasure from_weights(SpacePtr space, std::span<const double> weights);
  static PositiveMeasure from_weights(SpacePtr space, const Eigen::VectorXd& weights);

  const SpacePtr& space() const noexcept { return space_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  bool empty() const noexcept { return atoms_.empty(); }
  double total_mass() const noexcept;
  /// Finite spaces only: dense weight vector of length space().size().
  Eigen::VectorXd dense() const;
  PositiveMeasure scaled(double factor) const;

 private:
  struct Normalized {};
  PositiveMeasure(SpacePtr space, std::vector<Atom> atoms, Normalized);

  SpacePtr space_;
  std::vector<Atom> atoms_;

  friend class SignedMeasure;
};

/// A finitely supported signed measure kept as a positive/negative pair.
/// After normalization the two parts share no atom location, so the pair is
/// the Jordan decomposition.
class SignedMeasure {
 public:
  explicit SignedMeasure(PositiveMeasure pos);
  /// Raw pair; the parts may overlap until normalize_atoms is applied.
  SignedMeasure(PositiveMeasure pos, PositiveMeasure neg);

  static SignedMeasure zero(SpacePtr space);
  /// Merges, cancels and prunes an arbitrary list of signed atoms.
  static SignedMeasure from_atoms(SpacePtr space, std::vector<Atom> signed_atoms);
  /// Finite spaces only.
  static SignedMeasure from_weights(SpacePtr space, const Eigen::VectorXd& weights);

  const SpacePtr& space() const noexcept { return pos_.space(); }
  const PositiveMeasure& positive() const noexcept { return pos_; }
  const PositiveMeasure& negative() const noexcept { return neg_; }
  bool normalized() const noexcept { return normalized_; }
  bool is_zero() const noexcept { return pos_.empty() && neg_.empty(); }

  /// Positive atoms followed by negative atoms (with negated weights). For a
  /// normalized measure this is the merged signed atom list.
  std::vector<Atom> signed_atoms() const;
  /// Finite spaces only.
  Eigen::VectorXd dense() const;
  SignedMeasure negated() const;

 private:
  PositiveMeasure pos_;
  PositiveMeasure neg_;
  bool normalized_ = false;
};

SignedMeasure normalize_atoms(const SignedMeasure& mu);

double tv_norm(const SignedMeasure& mu);
double tv_norm(const PositiveMeasure& mu);

/// sum_i coeffs[i] * measures[i], normalized. Throws SpaceMismatch if the
/// measures do not share a state space.
SignedMeasure linear_combine(std::span<const double> coeffs,
                             std::span<const SignedMeasure> measures);

/// a - b, normalized.
SignedMeasure difference(const PositiveMeasure& a, const PositiveMeasure& b);
SignedMeasure difference(const SignedMeasure& a, const SignedMeasure& b);

/// Nonnegative combination sum_i coeffs[i] * measures[i] (coeffs >= 0).
PositiveMeasure positive_combine(std::span<const double> coeffs,
                                 std::span<const PositiveMeasure> measures);

/// Support points of mu+ and mu- together, sorted and deduplicated.
std::vector<Point> union_support(const SignedMeasure& mu);

}  // namespace trotterkit
