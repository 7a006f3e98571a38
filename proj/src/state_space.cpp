#include "trotterkit/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trotterkit/errors.hpp"

namespace trotterkit {

std::string Point::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (coords.empty()) {
    os << "state " << index;
  } else {
    os << "(";
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (i) os << ", ";
      os << coords[i];
    }
    os << ")";
  }
  return os.str();
}

std::string metric_violation(const Eigen::MatrixXd& dist) {
  const auto m = dist.rows();
  if (m != dist.cols()) return "distance matrix is not square";
  if (m == 0) return "distance matrix is empty";
  double scale = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!std::isfinite(dist(i, j))) return "distance matrix has a non-finite entry";
      scale = std::max(scale, std::abs(dist(i, j)));
    }
  }
  const double tol = 1e-12 * std::max(1.0, scale);
  std::ostringstream os;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (dist(i, i) != 0.0) {
      os << "d(" << i << "," << i << ") is not zero";
      return os.str();
    }
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (std::abs(dist(i, j) - dist(j, i)) > tol) {
        os << "d is not symmetric at (" << i << "," << j << ")";
        return os.str();
      }
      if (!(dist(i, j) > 0.0)) {
        os << "d(" << i << "," << j << ") is not strictly positive";
        return os.str();
      }
    }
  }
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < m; ++k)
        if (dist(i, j) > dist(i, k) + dist(k, j) + tol) {
          os << "triangle inequality fails: d(" << i << "," << j << ") > d(" << i
             << "," << k << ") + d(" << k << "," << j << ")";
          return os.str();
        }
  return {};
}

std::shared_ptr<const StateSpace> StateSpace::finite(Eigen::MatrixXd dist) {
  if (auto why = metric_violation(dist); !why.empty())
    throw InvalidArgument("invalid finite metric: " + why);
  std::shared_ptr<StateSpace> s(new StateSpace());
  s->kind_ = Kind::finite;
  s->size_ = static_cast<std::size_t>(dist.rows());
  s->dist_ = std::move(dist);
  return s;
}

std::shared_ptr<const StateSpace> StateSpace::euclidean(std::size_t dim) {
  if (dim == 0) throw InvalidArgument("Euclidean space needs dim >= 1");
  std::shared_ptr<StateSpace> s(new StateSpace());
  s->kind_ = Kind::euclidean;
  s->dim_ = dim;
  return s;
}

std::shared_ptr<const StateSpace> StateSpace::uniform_finite(std::size_t m,
                                                             double scale) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(m),
                                                static_cast<Eigen::Index>(m), scale);
  d.diagonal().setZero();
  return finite(std::move(d));
}

double StateSpace::distance(const Point& a, const Point& b) const {
  if (kind_ == Kind::finite) {
    return dist_(static_cast<Eigen::Index>(a.index), static_cast<Eigen::Index>(b.index));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double diff = a.coords[i] - b.coords[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

bool StateSpace::coincident(const Point& a, const Point& b) const {
  if (kind_ == Kind::finite) return a.index == b.index;
  for (std::size_t i = 0; i < dim_; ++i)
    if (std::abs(a.coords[i] - b.coords[i]) >= kCoincidenceTolerance) return false;
  return true;
}

void StateSpace::check_point(const Point& p) const {
  if (kind_ == Kind::finite) {
    if (p.index >= size_ || !p.coords.empty())
      throw InvalidArgument(p.describe() + " is not a state of a " +
                            std::to_string(size_) + "-state space");
    return;
  }
  if (p.coords.size() != dim_)
    throw InvalidArgument(p.describe() + " does not have dimension " + std::to_string(dim_));
  for (double c : p.coords)
    if (!std::isfinite(c)) throw InvalidArgument(p.describe() + " has a non-finite coordinate");
}

bool StateSpace::less(const Point& a, const Point& b) const {
  if (kind_ == Kind::finite) return a.index < b.index;
  return a.coords < b.coords;
}

bool StateSpace::operator==(const StateSpace& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::euclidean) return dim_ == other.dim_;
  return size_ == other.size_ && dist_ == other.dist_;
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

}  // namespace trotterkit
