#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trotterkit/bl_metric.hpp"
#include "trotterkit/measure.hpp"

namespace trotterkit {

/// Point-to-point map on a Euclidean space.
using PointMap = std::function<Coords(const Coords&)>;
/// Transition kernel: x -> probability measure.
using KernelFn = std::function<PositiveMeasure(const Point&)>;

/// A Markov operator on finitely supported measures: a column-stochastic
/// matrix, a deterministic map (an index map on finite spaces, a point map on
/// Euclidean ones), or a transition kernel. Immutable; cheap to copy.
class MarkovOperator {
 public:
  enum class Kind { stochastic_matrix, deterministic_map, kernel };

  static MarkovOperator identity(SpacePtr space);
  /// Columns are the images of the Dirac masses: P(i, j) = P(delta_j)({i}).
  static MarkovOperator stochastic_matrix(SpacePtr space, Eigen::MatrixXd P);
  static MarkovOperator index_map(SpacePtr space, std::vector<std::size_t> image);
  static MarkovOperator point_map(SpacePtr space, PointMap map, std::string label);
  static MarkovOperator kernel(SpacePtr space, KernelFn kernel, std::string label);
  /// Finite kernel given per state; each must have mass 1 within 1e-12.
  static MarkovOperator finite_kernel(SpacePtr space, std::vector<PositiveMeasure> rows);

  Kind kind() const noexcept { return kind_; }
  const SpacePtr& space() const noexcept { return space_; }
  const std::string& label() const noexcept { return label_; }
  bool is_identity() const noexcept { return identity_; }

  /// Dense matrix for stochastic_matrix operators; throws otherwise.
  const Eigen::MatrixXd& matrix() const;
  /// Finite spaces: matrix whose column j is the image of delta_j.
  Eigen::MatrixXd to_matrix() const;

  /// Image of a single Dirac mass.
  PositiveMeasure image_of(const Point& x) const;

  PositiveMeasure apply(const PositiveMeasure& mu) const;
  SignedMeasure apply(const SignedMeasure& mu) const;

 private:
  MarkovOperator() = default;

  Kind kind_ = Kind::stochastic_matrix;
  SpacePtr space_;
  std::string label_;
  bool identity_ = false;
  std::shared_ptr<const Eigen::MatrixXd> matrix_;
  std::shared_ptr<const std::vector<std::size_t>> index_map_;
  PointMap point_map_;
  KernelFn kernel_;
};

PositiveMeasure apply(const MarkovOperator& P, const PositiveMeasure& mu);
/// P mu+ - P mu-, normalized.
SignedMeasure apply_signed(const MarkovOperator& P, const SignedMeasure& mu);

/// (Uf)(x) = <P delta_x, f> on `query` points (default: f's own points).
/// supBound is carried over; lipBound is recomputed by a pairwise scan on
/// finite spaces and set to 2 * supBound / (smallest pairwise distance) on
/// Euclidean ones. Throws MissingPoint if f is needed off its domain.
LipschitzWitness dual_apply(const MarkovOperator& P, const LipschitzWitness& f,
                            std::optional<std::vector<Point>> query = std::nullopt);

/// Counters for the Markov axioms, checked on every operator application:
/// total variation preserved within 1e-12 (relative to max(1, tv)) and no
/// negative output weight.
struct AxiomCounters {
  long long applications = 0;
  long long tv_violations = 0;
  long long positivity_violations = 0;
  double max_tv_drift = 0.0;
};

AxiomCounters axiom_counters();
void reset_axiom_counters();

inline constexpr double kTvTolerance = 1e-12;

}  // namespace trotterkit
