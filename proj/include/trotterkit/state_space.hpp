#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace trotterkit {

/// Coordinates of a Euclidean point. Finite-space points leave this empty.
using Coords = std::vector<double>;

/// An element of a state space: an index for finite spaces, coordinates for
/// Euclidean ones. The unused half stays default-initialized.
struct Point {
  std::size_t index = 0;
  Coords coords;

  static Point state(std::size_t i) { return Point{i, {}}; }
  static Point at(Coords x) { return Point{0, std::move(x)}; }

  std::string describe() const;
};

/// Euclidean points closer than this in every coordinate are the same atom.
inline constexpr double kCoincidenceTolerance = 1e-12;

/// The metric space (S, d) that measures live on.
///
/// A finite space stores its full distance matrix, which is checked on
/// construction for symmetry, a zero diagonal, strictly positive off-diagonal
/// entries and the triangle inequality. A Euclidean space of dimension `dim`
/// uses the Euclidean distance.
class StateSpace {
 public:
  enum class Kind { finite, euclidean };

  static std::shared_ptr<const StateSpace> finite(Eigen::MatrixXd dist);
  static std::shared_ptr<const StateSpace> euclidean(std::size_t dim);
  /// m states with d(i, j) = scale for every i != j.
  static std::shared_ptr<const StateSpace> uniform_finite(std::size_t m,
                                                          double scale = 1.0);

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::finite; }
  /// Number of states (finite) or 0 (Euclidean).
  std::size_t size() const noexcept { return size_; }
  /// Coordinate dimension (Euclidean) or 0 (finite).
  std::size_t dim() const noexcept { return dim_; }
  const Eigen::MatrixXd& dist() const noexcept { return dist_; }

  double distance(const Point& a, const Point& b) const;
  bool coincident(const Point& a, const Point& b) const;
  /// Throws InvalidArgument if `p` is not an element of this space.
  void check_point(const Point& p) const;

  /// Strict total order compatible with `coincident` for finite spaces and
  /// lexicographic on coordinates for Euclidean spaces.
  bool less(const Point& a, const Point& b) const;

  bool operator==(const StateSpace& other) const;

 private:
  StateSpace() = default;

  Kind kind_ = Kind::finite;
  std::size_t size_ = 0;
  std::size_t dim_ = 0;
  Eigen::MatrixXd dist_;
};

using SpacePtr = std::shared_ptr<const StateSpace>;

bool same_space(const SpacePtr& a, const SpacePtr& b);

/// Returns an empty string when `dist` is a metric on its index set and a
/// human-readable reason otherwise.
std::string metric_violation(const Eigen::MatrixXd& dist);

}  // namespace trotterkit
