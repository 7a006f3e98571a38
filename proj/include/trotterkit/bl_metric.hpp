#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trotterkit/measure.hpp"
#include "trotterkit/parallel.hpp"

namespace trotterkit {

/// A bounded Lipschitz function known on a finite point set, with certified
/// bounds: |values[i]| <= supBound and |values[i] - values[j]| <=
/// lipBound * d(points[i], points[j]).
struct LipschitzWitness {
  std::vector<Point> points;
  std::vector<double> values;
  double supBound = 0.0;
  double lipBound = 0.0;

  std::optional<double> find(const StateSpace& space, const Point& x) const;
  /// Throws MissingPoint naming `x` when it is not among `points`.
  double at(const StateSpace& space, const Point& x) const;
};

class EnvelopeMetric;

/// A metric on a state space: either the space's own metric d or an
/// envelope d_E built on top of it.
class Metric {
 public:
  static Metric base(SpacePtr space);
  static Metric envelope(std::shared_ptr<const EnvelopeMetric> env);

  double operator()(const Point& a, const Point& b) const;
  const SpacePtr& space() const noexcept { return space_; }
  bool is_base() const noexcept { return env_ == nullptr; }
  const EnvelopeMetric* envelope_metric() const noexcept { return env_.get(); }
  std::string label() const;

  /// Distance matrix over `points`.
  Eigen::MatrixXd distances(std::span<const Point> points) const;

 private:
  SpacePtr space_;
  std::shared_ptr<const EnvelopeMetric> env_;
};

/// d_E(x, y) = max(d(x, y), max_g |g(x) - g(y)|) over a finite family of
/// witnesses, evaluated per pair on demand.
class EnvelopeMetric {
 public:
  EnvelopeMetric(SpacePtr base, std::vector<LipschitzWitness> family, std::string truncation = {});

  double distance(const Point& a, const Point& b) const;
  const SpacePtr& base() const noexcept { return base_; }
  const std::vector<LipschitzWitness>& family() const noexcept { return family_; }
  /// Free-form description of how the family was truncated.
  const std::string& truncation() const noexcept { return truncation_; }

 private:
  SpacePtr base_;
  std::vector<LipschitzWitness> family_;
  std::string truncation_;
};

std::shared_ptr<const EnvelopeMetric> build_envelope_metric(SpacePtr base,
                                                            std::vector<LipschitzWitness> family,
                                                            std::string truncation = {});

/// A bounded Lipschitz test function defined everywhere on its space.
class TestFunction {
 public:
  TestFunction(std::function<double(const Point&)> fn, double sup_bound, double lip_bound,
               std::string label);
  /// Evaluates by lookup; throws MissingPoint off the witness's points.
  static TestFunction from_witness(SpacePtr space, LipschitzWitness w, std::string label = "witness");

  double operator()(const Point& x) const { return fn_(x); }
  double sup_bound() const noexcept { return sup_; }
  double lip_bound() const noexcept { return lip_; }
  const std::string& label() const noexcept { return label_; }
  LipschitzWitness materialize(std::vector<Point> points) const;

 private:
  std::function<double(const Point&)> fn_;
  double sup_;
  double lip_;
  std::string label_;
};

/// <mu, f>.
double pairing(const SignedMeasure& mu, const TestFunction& f);
double pairing(const PositiveMeasure& mu, const TestFunction& f);

/// Largest violation of the witness invariants under `metric`, in absolute
/// units; <= slack means feasible. With unit_ball the bound sum is checked too.
double witness_violation(const LipschitzWitness& w, const Metric& metric, bool unit_ball);

struct BlNorm {
  double value = 0.0;
  LipschitzWitness witness;
};

/// Raw LP answer over a support with weights c and distance matrix D.
struct BlLpSolution {
  double value = 0.0;
  Eigen::VectorXd f;
  double sup = 0.0;
  double lip = 0.0;
};

/// Solves max sum c_i f_i s.t. -M <= f_i <= M, |f_i - f_j| <= L D_ij,
/// M + L <= 1, preferring the smallest L among optimal solutions.
BlLpSolution solve_bl_lp(std::span<const double> c, const Eigen::MatrixXd& D);

/// Dual bounded-Lipschitz norm of mu in the metric of its own space.
BlNorm bl_dual_norm(const SignedMeasure& mu);
BlNorm bl_dual_norm(const SignedMeasure& mu, const Metric& metric);

/// ||a - b||*_BL.
double bl_distance(const PositiveMeasure& a, const PositiveMeasure& b);
double bl_distance(const PositiveMeasure& a, const PositiveMeasure& b, const Metric& metric);

/// Largest support the oracle accepts.
inline constexpr std::size_t kOracleMaxSupport = 6;

/// Independent check of bl_dual_norm: enumerates every vertex of the
/// feasible polytope instead of pivoting. Throws InvalidArgument for supports
/// larger than kOracleMaxSupport.
double bl_dual_norm_oracle(const SignedMeasure& mu, const Metric& metric,
                           Execution exec = Execution::parallel);
double bl_dual_norm_oracle(const SignedMeasure& mu, Execution exec = Execution::parallel);

}  // namespace trotterkit
