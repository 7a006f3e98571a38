#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "trotterkit/operators.hpp"

namespace trotterkit {

/// Per-point weight realizing the seminorm |mu|_{M0} = sum_i w_i * weight(x_i).
enum class NormWeight { none, one, euclidean_norm };

/// A time-indexed family of Markov operators P_t.
///
///  - matrix_exponential: P_t = e^{tQ} for a generator Q on a finite space.
///  - linear_flow_lift:   P_t delta_x = delta_{e^{tA} x} on R^dim.
///  - map_flow:           P_t delta_x = delta_{phi_t(x)} for a closed-form flow
///                        (translation, contraction, rotation).
class Semigroup {
 public:
  enum class Kind { matrix_exponential, linear_flow_lift, map_flow };
  enum class Flow { none, translation, contraction, rotation };

  static Semigroup generator(SpacePtr space, Eigen::MatrixXd Q);
  static Semigroup linear_flow(SpacePtr space, Eigen::MatrixXd A);
  /// phi_t(x) = x + t v.
  static Semigroup translation(SpacePtr space, Coords velocity);
  /// phi_t(x) = e^{-rate t} x.
  static Semigroup contraction(SpacePtr space, double rate = 1.0);
  /// phi_t(x) = R(omega t) x on R^2.
  static Semigroup rotation(SpacePtr space, double omega);
  /// Zero generator (finite) or zero linear flow (Euclidean).
  static Semigroup identity(SpacePtr space);

  Semigroup with_norm_weight(NormWeight w) const;

  Kind kind() const noexcept { return kind_; }
  Flow flow() const noexcept { return flow_; }
  const SpacePtr& space() const noexcept { return space_; }
  NormWeight norm_weight() const noexcept { return weight_; }
  /// Q for matrix_exponential, A for linear_flow_lift.
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const Coords& velocity() const noexcept { return velocity_; }
  double rate() const noexcept { return rate_; }
  std::string describe() const;

  /// Linear part L with phi_t(x) = e^{tL} x, when the flow is linear.
  std::optional<Eigen::MatrixXd> linear_part() const;

  /// Throws InvalidArgument for t < 0. For generators the result is checked
  /// to be column-stochastic within 1e-12 and never renormalized.
  MarkovOperator at_time(double t) const;

 private:
  Semigroup() = default;

  Kind kind_ = Kind::matrix_exponential;
  Flow flow_ = Flow::none;
  SpacePtr space_;
  Eigen::MatrixXd matrix_;
  Coords velocity_;
  double rate_ = 0.0;
  NormWeight weight_ = NormWeight::none;
};

MarkovOperator at_time(const Semigroup& g, double t);

/// |mu|_{M0}; throws InvalidArgument when g carries no norm weight.
double m0_seminorm(const Semigroup& g, const PositiveMeasure& mu);

}  // namespace trotterkit
