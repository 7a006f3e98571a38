#include "trotterkit/measure.hpp"

#include <algorithm>
#include <cmath>

#include "trotterkit/errors.hpp"

namespace trotterkit {

namespace {

// Sorts, merges coincident atoms and prunes atoms below the relative
// tolerance. Works for signed weights.
std::vector<Atom> merge_and_prune(const StateSpace& space, std::vector<Atom> atoms) {
  if (atoms.empty()) return atoms;
  std::stable_sort(atoms.begin(), atoms.end(), [&](const Atom& a, const Atom& b) {
    return space.less(a.point, b.point);
  });

  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  if (space.is_finite()) {
    for (auto& a : atoms) {
      if (!merged.empty() && merged.back().point.index == a.point.index) {
        merged.back().weight += a.weight;
      } else {
        merged.push_back(std::move(a));
      }
    }
  } else {
    // Lexicographic order puts every candidate partner of an atom within
    // kCoincidenceTolerance of it in the first coordinate, so a backward scan
    // over that window finds it.
    for (auto& a : atoms) {
      bool joined = false;
      for (auto it = merged.rbegin(); it != merged.rend(); ++it) {
        if (a.point.coords[0] - it->point.coords[0] >= kCoincidenceTolerance) break;
        if (space.coincident(it->point, a.point)) {
          it->weight += a.weight;
          joined = true;
          break;
        }
      }
      if (!joined) merged.push_back(std::move(a));
    }
  }

  double tv = 0.0;
  for (const auto& a : merged) tv += std::abs(a.weight);
  const double cut = kPruneTolerance * tv;
  std::erase_if(merged, [&](const Atom& a) {
    return a.weight == 0.0 || std::abs(a.weight) < cut;
  });
  return merged;
}

void check_atoms(const StateSpace& space, const std::vector<Atom>& atoms, bool positive) {
  for (const auto& a : atoms) {
    space.check_point(a.point);
    if (!std::isfinite(a.weight))
      throw InvalidArgument("non-finite weight at " + a.point.describe());
    if (positive && a.weight < 0.0)
      throw InvalidArgument("negative weight at " + a.point.describe() +
                            " in a positive measure");
  }
}

}  // namespace

PositiveMeasure::PositiveMeasure(SpacePtr space, std::vector<Atom> atoms)
    : space_(std::move(space)) {
  if (!space_) throw InvalidArgument("measure without a state space");
  check_atoms(*space_, atoms, true);
  atoms_ = merge_and_prune(*space_, std::move(atoms));
}

PositiveMeasure::PositiveMeasure(SpacePtr space, std::vector<Atom> atoms, Normalized)
    : space_(std::move(space)), atoms_(std::move(atoms)) {}

PositiveMeasure PositiveMeasure::zero(SpacePtr space) {
  return PositiveMeasure(std::move(space), {});
}

PositiveMeasure PositiveMeasure::dirac(SpacePtr space, Point x, double weight) {
  std::vector<Atom> atoms;
  atoms.push_back(Atom{std::move(x), weight});
  return PositiveMeasure(std::move(space), std::move(atoms));
}

PositiveMeasure PositiveMeasure::from_weights(SpacePtr space,
                                              std::span<const double> weights) {
  if (!space || !space->is_finite())
    throw InvalidArgument("from_weights needs a finite state space");
  if (weights.size() != space->size())
    throw InvalidArgument("weight vector length does not match the state count");
  double tv = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      throw InvalidArgument("positive measure weights must be finite and >= 0");
    tv += w;
  }
  const double cut = kPruneTolerance * tv;
  std::vector<Atom> atoms;
  atoms.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] != 0.0 && weights[i] >= cut) atoms.push_back(Atom{Point::state(i), weights[i]});
  return PositiveMeasure(std::move(space), std::move(atoms), Normalized{});
}

PositiveMeasure PositiveMeasure::from_weights(SpacePtr space, const Eigen::VectorXd& weights) {
  return from_weights(std::move(space),
                      std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size())));
}

double PositiveMeasure::total_mass() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight;
  return s;
}

Eigen::VectorXd PositiveMeasure::dense() const {
  if (!space_->is_finite()) throw InvalidArgument("dense() needs a finite state space");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space_->size()));
  for (const auto& a : atoms_) w(static_cast<Eigen::Index>(a.point.index)) += a.weight;
  return w;
}

PositiveMeasure PositiveMeasure::scaled(double factor) const {
  if (!(factor >= 0.0)) throw InvalidArgument("positive measures scale by factors >= 0");
  if (factor == 0.0) return zero(space_);
  auto atoms = atoms_;
  for (auto& a : atoms) a.weight *= factor;
  return PositiveMeasure(space_, std::move(atoms), Normalized{});
}

SignedMeasure::SignedMeasure(PositiveMeasure pos)
    : pos_(std::move(pos)), neg_(PositiveMeasure::zero(pos_.space())), normalized_(true) {}

SignedMeasure::SignedMeasure(PositiveMeasure pos, PositiveMeasure neg)
    : pos_(std::move(pos)), neg_(std::move(neg)), normalized_(neg_.empty() || pos_.empty()) {
  if (!same_space(pos_.space(), neg_.space()))
    throw SpaceMismatch("positive and negative parts live on different spaces");
}

SignedMeasure SignedMeasure::zero(SpacePtr space) {
  return SignedMeasure(PositiveMeasure::zero(std::move(space)));
}

SignedMeasure SignedMeasure::from_atoms(SpacePtr space, std::vector<Atom> signed_atoms) {
  if (!space) throw InvalidArgument("measure without a state space");
  check_atoms(*space, signed_atoms, false);
  auto merged = merge_and_prune(*space, std::move(signed_atoms));
  std::vector<Atom> pos, neg;
  for (auto& a : merged) {
    if (a.weight > 0.0) {
      pos.push_back(std::move(a));
    } else {
      a.weight = -a.weight;
      neg.push_back(std::move(a));
    }
  }
  SignedMeasure out(PositiveMeasure(space, std::move(pos), PositiveMeasure::Normalized{}),
                    PositiveMeasure(space, std::move(neg), PositiveMeasure::Normalized{}));
  out.normalized_ = true;
  return out;
}

SignedMeasure SignedMeasure::from_weights(SpacePtr space, const Eigen::VectorXd& weights) {
  if (!space || !space->is_finite())
    throw InvalidArgument("from_weights needs a finite state space");
  if (static_cast<std::size_t>(weights.size()) != space->size())
    throw InvalidArgument("weight vector length does not match the state count");
  double tv = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights(i))) throw InvalidArgument("non-finite signed weight");
    tv += std::abs(weights(i));
  }
  const double cut = kPruneTolerance * tv;
  std::vector<Atom> pos, neg;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double w = weights(i);
    if (w == 0.0 || std::abs(w) < cut) continue;
    const auto p = Point::state(static_cast<std::size_t>(i));
    if (w > 0.0) {
      pos.push_back(Atom{p, w});
    } else {
      neg.push_back(Atom{p, -w});
    }
  }
  SignedMeasure out(PositiveMeasure(space, std::move(pos), PositiveMeasure::Normalized{}),
                    PositiveMeasure(space, std::move(neg), PositiveMeasure::Normalized{}));
  out.normalized_ = true;
  return out;
}

std::vector<Atom> SignedMeasure::signed_atoms() const {
  std::vector<Atom> out = pos_.atoms();
  out.reserve(pos_.atoms().size() + neg_.atoms().size());
  for (const auto& a : neg_.atoms()) out.push_back(Atom{a.point, -a.weight});
  return out;
}

Eigen::VectorXd SignedMeasure::dense() const { return pos_.dense() - neg_.dense(); }

SignedMeasure SignedMeasure::negated() const {
  SignedMeasure out(neg_, pos_);
  out.normalized_ = normalized_;
  return out;
}

SignedMeasure normalize_atoms(const SignedMeasure& mu) {
  return SignedMeasure::from_atoms(mu.space(), mu.signed_atoms());
}

double tv_norm(const PositiveMeasure& mu) { return mu.total_mass(); }

double tv_norm(const SignedMeasure& mu) {
  if (!mu.normalized()) return tv_norm(normalize_atoms(mu));
  return mu.positive().total_mass() + mu.negative().total_mass();
}

SignedMeasure linear_combine(std::span<const double> coeffs,
                             std::span<const SignedMeasure> measures) {
  if (coeffs.size() != measures.size())
    throw InvalidArgument("linear_combine: coefficient and measure counts differ");
  if (measures.empty()) throw InvalidArgument("linear_combine: no measures");
  const SpacePtr& space = measures.front().space();
  for (const auto& m : measures)
    if (!same_space(space, m.space()))
      throw SpaceMismatch("linear_combine: measures live on incompatible state spaces");

  if (space->is_finite()) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space->size()));
    for (std::size_t i = 0; i < measures.size(); ++i) {
      if (coeffs[i] == 0.0) continue;
      for (const auto& a : measures[i].positive().atoms())
        w(static_cast<Eigen::Index>(a.point.index)) += coeffs[i] * a.weight;
      for (const auto& a : measures[i].negative().atoms())
        w(static_cast<Eigen::Index>(a.point.index)) -= coeffs[i] * a.weight;
    }
    return SignedMeasure::from_weights(space, w);
  }

  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    if (coeffs[i] == 0.0) continue;
    for (const auto& a : measures[i].positive().atoms())
      atoms.push_back(Atom{a.point, coeffs[i] * a.weight});
    for (const auto& a : measures[i].negative().atoms())
      atoms.push_back(Atom{a.point, -coeffs[i] * a.weight});
  }
  return SignedMeasure::from_atoms(space, std::move(atoms));
}

SignedMeasure difference(const PositiveMeasure& a, const PositiveMeasure& b) {
  return normalize_atoms(SignedMeasure(a, b));
}

SignedMeasure difference(const SignedMeasure& a, const SignedMeasure& b) {
  const double coeffs[] = {1.0, -1.0};
  const SignedMeasure ms[] = {a, b};
  return linear_combine(coeffs, ms);
}

PositiveMeasure positive_combine(std::span<const double> coeffs,
                                 std::span<const PositiveMeasure> measures) {
  if (coeffs.size() != measures.size())
    throw InvalidArgument("positive_combine: coefficient and measure counts differ");
  if (measures.empty()) throw InvalidArgument("positive_combine: no measures");
  const SpacePtr& space = measures.front().space();
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    if (!same_space(space, measures[i].space()))
      throw SpaceMismatch("positive_combine: measures live on incompatible state spaces");
    if (!(coeffs[i] >= 0.0)) throw InvalidArgument("positive_combine: negative coefficient");
    if (coeffs[i] == 0.0) continue;
    for (const auto& a : measures[i].atoms()) atoms.push_back(Atom{a.point, coeffs[i] * a.weight});
  }
  return PositiveMeasure(space, std::move(atoms));
}

std::vector<Point> union_support(const SignedMeasure& mu) {
  const auto& space = *mu.space();
  std::vector<Atom> atoms;
  for (const auto& a : mu.positive().atoms()) atoms.push_back(Atom{a.point, 1.0});
  for (const auto& a : mu.negative().atoms()) atoms.push_back(Atom{a.point, 1.0});
  // Merging positive unit weights never cancels, so every location survives.
  auto merged = merge_and_prune(space, std::move(atoms));
  std::vector<Point> pts;
  pts.reserve(merged.size());
  for (auto& a : merged) pts.push_back(std::move(a.point));
  return pts;
}

}  // namespace trotterkit
