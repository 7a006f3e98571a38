#include "trotterkit/bl_metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trotterkit/errors.hpp"
#include "trotterkit/kernels.hpp"
#include "trotterkit/simplex.hpp"

namespace trotterkit {

std::optional<double> LipschitzWitness::find(const StateSpace& space, const Point& x) const {
  if (space.is_finite() && x.index < points.size() && points[x.index].index == x.index)
    return values[x.index];
  for (std::size_t i = 0; i < points.size(); ++i)
    if (space.coincident(points[i], x)) return values[i];
  return std::nullopt;
}

double LipschitzWitness::at(const StateSpace& space, const Point& x) const {
  if (auto v = find(space, x)) return *v;
  throw MissingPoint("witness is not defined at " + x.describe());
}

Metric Metric::base(SpacePtr space) {
  if (!space) throw InvalidArgument("metric without a state space");
  Metric m;
  m.space_ = std::move(space);
  return m;
}

Metric Metric::envelope(std::shared_ptr<const EnvelopeMetric> env) {
  if (!env) throw InvalidArgument("null envelope metric");
  Metric m;
  m.space_ = env->base();
  m.env_ = std::move(env);
  return m;
}

double Metric::operator()(const Point& a, const Point& b) const {
  return env_ ? env_->distance(a, b) : space_->distance(a, b);
}

std::string Metric::label() const {
  if (!env_) return "base";
  std::ostringstream os;
  os << "envelope(" << env_->family().size() << " functions";
  if (!env_->truncation().empty()) os << "; " << env_->truncation();
  os << ")";
  return os.str();
}

Eigen::MatrixXd Metric::distances(std::span<const Point> points) const {
  if (!env_) return kernels::pairwise_distances(*space_, points);
  const auto k = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j)
      D(i, j) = D(j, i) =
          env_->distance(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
  return D;
}

EnvelopeMetric::EnvelopeMetric(SpacePtr base, std::vector<LipschitzWitness> family,
                               std::string truncation)
    : base_(std::move(base)), family_(std::move(family)), truncation_(std::move(truncation)) {
  if (!base_) throw InvalidArgument("envelope metric without a base space");
  for (const auto& g : family_) {
    if (g.points.size() != g.values.size())
      throw InvalidArgument("envelope family member has mismatched points and values");
    for (double v : g.values)
      if (!std::isfinite(v)) throw InvalidArgument("envelope family member is not finite-valued");
  }
}

double EnvelopeMetric::distance(const Point& a, const Point& b) const {
  double d = base_->distance(a, b);
  if (base_->coincident(a, b)) return d;
  for (const auto& g : family_) d = std::max(d, std::abs(g.at(*base_, a) - g.at(*base_, b)));
  return d;
}

std::shared_ptr<const EnvelopeMetric> build_envelope_metric(SpacePtr base,
                                                            std::vector<LipschitzWitness> family,
                                                            std::string truncation) {
  return std::make_shared<const EnvelopeMetric>(std::move(base), std::move(family),
                                                std::move(truncation));
}

TestFunction::TestFunction(std::function<double(const Point&)> fn, double sup_bound,
                           double lip_bound, std::string label)
    : fn_(std::move(fn)), sup_(sup_bound), lip_(lip_bound), label_(std::move(label)) {
  if (!fn_) throw InvalidArgument("test function without a body");
}

TestFunction TestFunction::from_witness(SpacePtr space, LipschitzWitness w, std::string label) {
  const double sup = w.supBound, lip = w.lipBound;
  auto shared = std::make_shared<const LipschitzWitness>(std::move(w));
  return TestFunction([space, shared](const Point& x) { return shared->at(*space, x); }, sup, lip,
                      std::move(label));
}

LipschitzWitness TestFunction::materialize(std::vector<Point> points) const {
  LipschitzWitness w;
  w.values.reserve(points.size());
  for (const auto& p : points) w.values.push_back(fn_(p));
  w.points = std::move(points);
  w.supBound = sup_;
  w.lipBound = lip_;
  return w;
}

double pairing(const PositiveMeasure& mu, const TestFunction& f) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.weight * f(a.point);
  return s;
}

double pairing(const SignedMeasure& mu, const TestFunction& f) {
  return pairing(mu.positive(), f) - pairing(mu.negative(), f);
}

double witness_violation(const LipschitzWitness& w, const Metric& metric, bool unit_ball) {
  if (w.points.size() != w.values.size())
    throw InvalidArgument("witness has mismatched points and values");
  double worst = 0.0;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    worst = std::max(worst, std::abs(w.values[i]) - w.supBound);
    for (std::size_t j = i + 1; j < w.values.size(); ++j)
      worst = std::max(worst, std::abs(w.values[i] - w.values[j]) -
                                  w.lipBound * metric(w.points[i], w.points[j]));
  }
  if (unit_ball) worst = std::max(worst, w.supBound + w.lipBound - 1.0);
  return std::max(worst, 0.0);
}

BlLpSolution solve_bl_lp(std::span<const double> c, const Eigen::MatrixXd& D) {
  const auto k = static_cast<Eigen::Index>(c.size());
  if (D.rows() != k || D.cols() != k)
    throw InvalidArgument("solve_bl_lp: distance matrix does not match the weights");
  BlLpSolution out;
  out.f = Eigen::VectorXd::Zero(k);
  if (k == 0) return out;

  // Shift f_i = g_i - M so every variable is nonnegative and the origin is a
  // feasible vertex: x = (g_1..g_k, M, L).
  const Eigen::Index nv = k + 2;
  const Eigen::Index iM = k, iL = k + 1;
  const Eigen::Index rows = k + k * (k - 1) + 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, nv);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < k; ++i, ++r) {
    A(r, i) = 1.0;
    A(r, iM) = -2.0;
  }
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i == j) continue;
      A(r, i) = 1.0;
      A(r, j) = -1.0;
      A(r, iL) = -D(i, j);
      ++r;
    }
  A(r, iM) = 1.0;
  A(r, iL) = 1.0;
  b(r) = 1.0;

  // The simplex tolerances are absolute, so solve with unit-scale weights.
  double cmax = 0.0;
  for (double v : c) cmax = std::max(cmax, std::abs(v));
  if (cmax == 0.0) return out;
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(nv);
  double csum = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    obj(i) = c[static_cast<std::size_t>(i)] / cmax;
    csum += obj(i);
  }
  obj(iM) = -csum;
  Eigen::VectorXd prefer_small_lip = Eigen::VectorXd::Zero(nv);
  prefer_small_lip(iL) = -1.0;

  const auto sol = lp::maximize(A, b, obj, prefer_small_lip);
  out.sup = sol.x(iM);
  out.lip = sol.x(iL);
  for (Eigen::Index i = 0; i < k; ++i) {
    // Clip roundoff so the witness certifies its own sup bound.
    out.f(i) = std::clamp(sol.x(i) - out.sup, -out.sup, out.sup);
  }
  double value = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) value += c[static_cast<std::size_t>(i)] * out.f(i);
  out.value = std::max(value, 0.0);
  return out;
}

namespace {

struct SupportData {
  std::vector<Point> points;
  std::vector<double> weights;
};

SupportData support_of(const SignedMeasure& mu) {
  const auto nm = mu.normalized() ? mu : normalize_atoms(mu);
  SupportData s;
  for (const auto& a : nm.signed_atoms()) {
    s.points.push_back(a.point);
    s.weights.push_back(a.weight);
  }
  // Jordan parts share no location, so the points are distinct; keep a
  // canonical order so the witness layout is deterministic.
  std::vector<std::size_t> order(s.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto& space = *mu.space();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return space.less(s.points[a], s.points[b]);
  });
  SupportData sorted;
  for (auto i : order) {
    sorted.points.push_back(s.points[i]);
    sorted.weights.push_back(s.weights[i]);
  }
  return sorted;
}

void check_metric_space(const SignedMeasure& mu, const Metric& metric) {
  if (!same_space(mu.space(), metric.space()))
    throw SpaceMismatch("measure and metric live on different state spaces");
}

}  // namespace

BlNorm bl_dual_norm(const SignedMeasure& mu) { return bl_dual_norm(mu, Metric::base(mu.space())); }

BlNorm bl_dual_norm(const SignedMeasure& mu, const Metric& metric) {
  check_metric_space(mu, metric);
  auto s = support_of(mu);
  BlNorm out;
  if (s.points.empty()) return out;
  const auto D = metric.distances(s.points);
  const auto sol = solve_bl_lp(s.weights, D);
  out.value = sol.value;
  out.witness.points = std::move(s.points);
  out.witness.values.assign(sol.f.data(), sol.f.data() + sol.f.size());
  out.witness.supBound = sol.sup;
  out.witness.lipBound = sol.lip;
  return out;
}

double bl_distance(const PositiveMeasure& a, const PositiveMeasure& b) {
  return bl_dual_norm(difference(a, b)).value;
}

double bl_distance(const PositiveMeasure& a, const PositiveMeasure& b, const Metric& metric) {
  return bl_dual_norm(difference(a, b), metric).value;
}

double bl_dual_norm_oracle(const SignedMeasure& mu, const Metric& metric, Execution exec) {
  check_metric_space(mu, metric);
  const auto s = support_of(mu);
  if (s.points.size() > kOracleMaxSupport)
    throw InvalidArgument("oracle refuses supports larger than " +
                          std::to_string(kOracleMaxSupport) + " atoms (got " +
                          std::to_string(s.points.size()) + ")");
  if (s.points.empty()) return 0.0;
  const auto D = metric.distances(s.points);
  return exec == Execution::parallel ? kernels::bl_vertex_max_parallel(s.weights, D)
                                     : kernels::bl_vertex_max_serial(s.weights, D);
}

double bl_dual_norm_oracle(const SignedMeasure& mu, Execution exec) {
  return bl_dual_norm_oracle(mu, Metric::base(mu.space()), exec);
}

}  // namespace trotterkit
