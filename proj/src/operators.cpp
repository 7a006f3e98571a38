#include "trotterkit/operators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "trotterkit/errors.hpp"
#include "trotterkit/expm.hpp"
#include "trotterkit/kernels.hpp"

namespace trotterkit {

namespace {

std::atomic<long long> g_applications{0};
std::atomic<long long> g_tv_violations{0};
std::atomic<long long> g_positivity_violations{0};
std::atomic<double> g_max_drift{0.0};

void record_application(const PositiveMeasure& in, const PositiveMeasure& out) {
  g_applications.fetch_add(1, std::memory_order_relaxed);
  const double tin = in.total_mass();
  const double drift = std::abs(out.total_mass() - tin);
  double seen = g_max_drift.load(std::memory_order_relaxed);
  while (drift > seen && !g_max_drift.compare_exchange_weak(seen, drift)) {
  }
  if (drift > kTvTolerance * std::max(1.0, tin)) g_tv_violations.fetch_add(1);
  for (const auto& a : out.atoms())
    if (a.weight < 0.0) {
      g_positivity_violations.fetch_add(1);
      break;
    }
}

void require_space(const MarkovOperator& P, const SpacePtr& s) {
  if (!same_space(P.space(), s))
    throw SpaceMismatch("operator and measure live on different state spaces");
}

}  // namespace

AxiomCounters axiom_counters() {
  AxiomCounters c;
  c.applications = g_applications.load();
  c.tv_violations = g_tv_violations.load();
  c.positivity_violations = g_positivity_violations.load();
  c.max_tv_drift = g_max_drift.load();
  return c;
}

void reset_axiom_counters() {
  g_applications = 0;
  g_tv_violations = 0;
  g_positivity_violations = 0;
  g_max_drift = 0.0;
}

MarkovOperator MarkovOperator::identity(SpacePtr space) {
  if (!space) throw InvalidArgument("operator without a state space");
  MarkovOperator op;
  op.space_ = std::move(space);
  op.identity_ = true;
  op.label_ = "identity";
  if (op.space_->is_finite()) {
    const auto m = static_cast<Eigen::Index>(op.space_->size());
    op.kind_ = Kind::stochastic_matrix;
    op.matrix_ = std::make_shared<const Eigen::MatrixXd>(Eigen::MatrixXd::Identity(m, m));
  } else {
    op.kind_ = Kind::deterministic_map;
    op.point_map_ = [](const Coords& x) { return x; };
  }
  return op;
}

MarkovOperator MarkovOperator::stochastic_matrix(SpacePtr space, Eigen::MatrixXd P) {
  if (!space || !space->is_finite())
    throw InvalidArgument("stochastic matrix operators need a finite state space");
  const auto m = static_cast<Eigen::Index>(space->size());
  if (P.rows() != m || P.cols() != m)
    throw InvalidArgument("stochastic matrix does not match the state count");
  if (!P.allFinite()) throw InvalidArgument("stochastic matrix has non-finite entries");
  const auto defect = stochastic_defect(P);
  if (defect.negativity > 0.0)
    throw NumericalError("stochastic matrix has a negative entry");
  if (defect.column_sum > kTvTolerance)
    throw NumericalError("stochastic matrix column sums deviate from 1 by " +
                         std::to_string(defect.column_sum));
  MarkovOperator op;
  op.kind_ = Kind::stochastic_matrix;
  op.space_ = std::move(space);
  op.label_ = "matrix";
  op.identity_ = P.isIdentity(0.0);
  op.matrix_ = std::make_shared<const Eigen::MatrixXd>(std::move(P));
  return op;
}

MarkovOperator MarkovOperator::index_map(SpacePtr space, std::vector<std::size_t> image) {
  if (!space || !space->is_finite())
    throw InvalidArgument("index maps need a finite state space");
  if (image.size() != space->size()) throw InvalidArgument("index map does not cover every state");
  bool ident = true;
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (image[i] >= space->size()) throw InvalidArgument("index map leaves the state space");
    ident = ident && image[i] == i;
  }
  MarkovOperator op;
  op.kind_ = Kind::deterministic_map;
  op.space_ = std::move(space);
  op.label_ = "index_map";
  op.identity_ = ident;
  op.index_map_ = std::make_shared<const std::vector<std::size_t>>(std::move(image));
  return op;
}

MarkovOperator MarkovOperator::point_map(SpacePtr space, PointMap map, std::string label) {
  if (!space || space->is_finite())
    throw InvalidArgument("point maps need a Euclidean state space");
  if (!map) throw InvalidArgument("point map without a body");
  MarkovOperator op;
  op.kind_ = Kind::deterministic_map;
  op.space_ = std::move(space);
  op.label_ = std::move(label);
  op.point_map_ = std::move(map);
  return op;
}

MarkovOperator MarkovOperator::kernel(SpacePtr space, KernelFn kernel, std::string label) {
  if (!space) throw InvalidArgument("operator without a state space");
  if (!kernel) throw InvalidArgument("kernel without a body");
  MarkovOperator op;
  op.kind_ = Kind::kernel;
  op.space_ = std::move(space);
  op.label_ = std::move(label);
  op.kernel_ = std::move(kernel);
  return op;
}

MarkovOperator MarkovOperator::finite_kernel(SpacePtr space, std::vector<PositiveMeasure> rows) {
  if (!space || !space->is_finite())
    throw InvalidArgument("finite kernels need a finite state space");
  if (rows.size() != space->size()) throw InvalidArgument("finite kernel does not cover every state");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!same_space(space, rows[i].space()))
      throw SpaceMismatch("kernel row lives on a different state space");
    if (std::abs(rows[i].total_mass() - 1.0) > kTvTolerance)
      throw NumericalError("kernel row " + std::to_string(i) + " does not have mass 1");
  }
  auto table = std::make_shared<const std::vector<PositiveMeasure>>(std::move(rows));
  return kernel(space, [table](const Point& x) { return (*table)[x.index]; }, "finite_kernel");
}

const Eigen::MatrixXd& MarkovOperator::matrix() const {
  if (kind_ != Kind::stochastic_matrix) throw InvalidArgument("operator is not a stochastic matrix");
  return *matrix_;
}

Eigen::MatrixXd MarkovOperator::to_matrix() const {
  if (!space_->is_finite()) throw InvalidArgument("to_matrix needs a finite state space");
  if (kind_ == Kind::stochastic_matrix) return *matrix_;
  const auto m = static_cast<Eigen::Index>(space_->size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    M.col(j) = image_of(Point::state(static_cast<std::size_t>(j))).dense();
  return M;
}

PositiveMeasure MarkovOperator::image_of(const Point& x) const {
  space_->check_point(x);
  switch (kind_) {
    case Kind::stochastic_matrix:
      return PositiveMeasure::from_weights(space_,
                                           Eigen::VectorXd(matrix_->col(static_cast<Eigen::Index>(x.index))));
    case Kind::deterministic_map:
      if (index_map_) return PositiveMeasure::dirac(space_, Point::state((*index_map_)[x.index]));
      return PositiveMeasure::dirac(space_, Point::at(point_map_(x.coords)));
    case Kind::kernel:
      return kernel_(x);
  }
  return PositiveMeasure::zero(space_);
}

PositiveMeasure MarkovOperator::apply(const PositiveMeasure& mu) const {
  require_space(*this, mu.space());
  if (identity_) {
    record_application(mu, mu);
    return mu;
  }
  std::optional<PositiveMeasure> out;
  switch (kind_) {
    case Kind::stochastic_matrix: {
      Eigen::VectorXd w;
      kernels::matvec(*matrix_, mu.dense(), w);
      out = PositiveMeasure::from_weights(space_, w);
      break;
    }
    case Kind::deterministic_map: {
      std::vector<Atom> atoms;
      atoms.reserve(mu.atoms().size());
      for (const auto& a : mu.atoms()) {
        if (index_map_) {
          atoms.push_back(Atom{Point::state((*index_map_)[a.point.index]), a.weight});
        } else {
          atoms.push_back(Atom{Point::at(point_map_(a.point.coords)), a.weight});
        }
      }
      out = PositiveMeasure(space_, std::move(atoms));
      break;
    }
    case Kind::kernel: {
      std::vector<Atom> atoms;
      for (const auto& a : mu.atoms()) {
        const auto row = kernel_(a.point);
        if (!same_space(space_, row.space()))
          throw SpaceMismatch("kernel produced a measure on a different space");
        for (const auto& b : row.atoms()) atoms.push_back(Atom{b.point, a.weight * b.weight});
      }
      out = PositiveMeasure(space_, std::move(atoms));
      break;
    }
  }
  record_application(mu, *out);
  return std::move(*out);
}

SignedMeasure MarkovOperator::apply(const SignedMeasure& mu) const {
  require_space(*this, mu.space());
  const auto nm = mu.normalized() ? mu : normalize_atoms(mu);
  return difference(apply(nm.positive()), apply(nm.negative()));
}

PositiveMeasure apply(const MarkovOperator& P, const PositiveMeasure& mu) { return P.apply(mu); }

SignedMeasure apply_signed(const MarkovOperator& P, const SignedMeasure& mu) { return P.apply(mu); }

LipschitzWitness dual_apply(const MarkovOperator& P, const LipschitzWitness& f,
                            std::optional<std::vector<Point>> query) {
  const auto& space = *P.space();
  LipschitzWitness out;
  out.points = query ? std::move(*query) : f.points;
  out.values.reserve(out.points.size());
  for (const auto& x : out.points) {
    const auto image = P.image_of(x);
    double v = 0.0;
    for (const auto& a : image.atoms()) {
      const auto fv = f.find(space, a.point);
      if (!fv)
        throw MissingPoint("dual_apply: f is not defined at " + a.point.describe() +
                           " (reached from " + x.describe() + ")");
      v += a.weight * *fv;
    }
    out.values.push_back(v);
  }
  out.supBound = f.supBound;
  if (out.points.size() < 2) {
    out.lipBound = 0.0;
  } else if (space.is_finite()) {
    const auto D = kernels::pairwise_distances(space, out.points);
    out.lipBound = kernels::lipschitz_ratio(out.values, D);
  } else {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.points.size(); ++i)
      for (std::size_t j = i + 1; j < out.points.size(); ++j)
        dmin = std::min(dmin, space.distance(out.points[i], out.points[j]));
    out.lipBound = dmin > 0.0 ? 2.0 * f.supBound / dmin : std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace trotterkit
