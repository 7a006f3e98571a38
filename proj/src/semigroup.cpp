#include "trotterkit/semigroup.hpp"

#include <cmath>
#include <sstream>

#include "trotterkit/errors.hpp"
#include "trotterkit/expm.hpp"

namespace trotterkit {

namespace {

Coords mat_apply(const Eigen::MatrixXd& M, const Coords& x) {
  Coords y(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
      s += M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[j];
    y[i] = s;
  }
  return y;
}

void require_euclidean(const SpacePtr& space, const char* what) {
  if (!space || space->is_finite())
    throw InvalidArgument(std::string(what) + " needs a Euclidean state space");
}

}  // namespace

Semigroup Semigroup::generator(SpacePtr space, Eigen::MatrixXd Q) {
  if (!space || !space->is_finite())
    throw InvalidArgument("matrix_exponential semigroups need a finite state space");
  const auto m = static_cast<Eigen::Index>(space->size());
  if (Q.rows() != m || Q.cols() != m) throw InvalidArgument("generator does not match the state count");
  if (!is_generator(Q))
    throw InvalidArgument("Q is not a generator (off-diagonal >= 0, zero column sums)");
  Semigroup g;
  g.kind_ = Kind::matrix_exponential;
  g.space_ = std::move(space);
  g.matrix_ = std::move(Q);
  return g;
}

Semigroup Semigroup::linear_flow(SpacePtr space, Eigen::MatrixXd A) {
  require_euclidean(space, "linear_flow_lift");
  const auto d = static_cast<Eigen::Index>(space->dim());
  if (A.rows() != d || A.cols() != d) throw InvalidArgument("flow matrix does not match the dimension");
  if (!A.allFinite()) throw InvalidArgument("flow matrix has non-finite entries");
  Semigroup g;
  g.kind_ = Kind::linear_flow_lift;
  g.space_ = std::move(space);
  g.matrix_ = std::move(A);
  return g;
}

Semigroup Semigroup::translation(SpacePtr space, Coords velocity) {
  require_euclidean(space, "translation flow");
  if (velocity.size() != space->dim()) throw InvalidArgument("velocity does not match the dimension");
  Semigroup g;
  g.kind_ = Kind::map_flow;
  g.flow_ = Flow::translation;
  g.space_ = std::move(space);
  g.velocity_ = std::move(velocity);
  return g;
}

Semigroup Semigroup::contraction(SpacePtr space, double rate) {
  require_euclidean(space, "contraction flow");
  if (!(rate >= 0.0)) throw InvalidArgument("contraction rate must be >= 0");
  Semigroup g;
  g.kind_ = Kind::map_flow;
  g.flow_ = Flow::contraction;
  g.space_ = std::move(space);
  g.rate_ = rate;
  return g;
}

Semigroup Semigroup::rotation(SpacePtr space, double omega) {
  require_euclidean(space, "rotation flow");
  if (space->dim() != 2) throw InvalidArgument("rotation flow needs dimension 2");
  if (!std::isfinite(omega)) throw InvalidArgument("rotation speed must be finite");
  Semigroup g;
  g.kind_ = Kind::map_flow;
  g.flow_ = Flow::rotation;
  g.space_ = std::move(space);
  g.rate_ = omega;
  return g;
}

Semigroup Semigroup::identity(SpacePtr space) {
  if (!space) throw InvalidArgument("semigroup without a state space");
  if (space->is_finite()) {
    const auto m = static_cast<Eigen::Index>(space->size());
    return generator(std::move(space), Eigen::MatrixXd::Zero(m, m));
  }
  const auto d = static_cast<Eigen::Index>(space->dim());
  return linear_flow(std::move(space), Eigen::MatrixXd::Zero(d, d));
}

Semigroup Semigroup::with_norm_weight(NormWeight w) const {
  if (w == NormWeight::euclidean_norm && space_->is_finite())
    throw InvalidArgument("euclidean_norm weight needs a Euclidean state space");
  Semigroup g = *this;
  g.weight_ = w;
  return g;
}

std::string Semigroup::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::matrix_exponential:
      os << "matrix_exponential(" << matrix_.rows() << " states)";
      break;
    case Kind::linear_flow_lift:
      os << "linear_flow_lift(dim " << matrix_.rows() << ")";
      break;
    case Kind::map_flow:
      os << (flow_ == Flow::translation   ? "translation"
             : flow_ == Flow::contraction ? "contraction"
                                          : "rotation")
         << "_flow";
      break;
  }
  return os.str();
}

std::optional<Eigen::MatrixXd> Semigroup::linear_part() const {
  switch (kind_) {
    case Kind::matrix_exponential:
      return std::nullopt;
    case Kind::linear_flow_lift:
      return matrix_;
    case Kind::map_flow: {
      const auto d = static_cast<Eigen::Index>(space_->dim());
      if (flow_ == Flow::contraction) return Eigen::MatrixXd(-rate_ * Eigen::MatrixXd::Identity(d, d));
      if (flow_ == Flow::rotation) {
        Eigen::MatrixXd J(2, 2);
        J << 0.0, -rate_, rate_, 0.0;
        return J;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

MarkovOperator Semigroup::at_time(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("at_time needs a finite t >= 0");
  if (t == 0.0) return MarkovOperator::identity(space_);
  switch (kind_) {
    case Kind::matrix_exponential: {
      auto P = expm_generator(matrix_, t);
      const auto defect = stochastic_defect(P);
      if (defect.column_sum > kTvTolerance || defect.negativity > 0.0)
        throw NumericalError("e^{tQ} failed the stochasticity check (column defect " +
                             std::to_string(defect.column_sum) + ")");
      return MarkovOperator::stochastic_matrix(space_, std::move(P));
    }
    case Kind::linear_flow_lift: {
      auto E = std::make_shared<const Eigen::MatrixXd>(expm_pade(t * matrix_));
      return MarkovOperator::point_map(
          space_, [E](const Coords& x) { return mat_apply(*E, x); }, "linear_flow");
    }
    case Kind::map_flow:
      switch (flow_) {
        case Flow::translation: {
          Coords shift = velocity_;
          for (auto& v : shift) v *= t;
          return MarkovOperator::point_map(
              space_,
              [shift](const Coords& x) {
                Coords y = x;
                for (std::size_t i = 0; i < y.size(); ++i) y[i] += shift[i];
                return y;
              },
              "translation");
        }
        case Flow::contraction: {
          const double factor = std::exp(-rate_ * t);
          return MarkovOperator::point_map(
              space_,
              [factor](const Coords& x) {
                Coords y = x;
                for (auto& v : y) v *= factor;
                return y;
              },
              "contraction");
        }
        case Flow::rotation: {
          const double c = std::cos(rate_ * t), s = std::sin(rate_ * t);
          return MarkovOperator::point_map(
              space_, [c, s](const Coords& x) { return Coords{c * x[0] - s * x[1], s * x[0] + c * x[1]}; },
              "rotation");
        }
        case Flow::none:
          break;
      }
      break;
  }
  throw InvalidArgument("semigroup has no time evolution");
}

MarkovOperator at_time(const Semigroup& g, double t) { return g.at_time(t); }

double m0_seminorm(const Semigroup& g, const PositiveMeasure& mu) {
  if (!same_space(g.space(), mu.space()))
    throw SpaceMismatch("semigroup and measure live on different state spaces");
  switch (g.norm_weight()) {
    case NormWeight::none:
      throw InvalidArgument("semigroup has no auxiliary norm weight");
    case NormWeight::one:
      return mu.total_mass();
    case NormWeight::euclidean_norm: {
      double s = 0.0;
      for (const auto& a : mu.atoms()) {
        double r = 0.0;
        for (double c : a.point.coords) r += c * c;
        s += a.weight * std::sqrt(r);
      }
      return s;
    }
  }
  return 0.0;
}

}  // namespace trotterkit
