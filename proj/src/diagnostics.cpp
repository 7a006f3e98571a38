#include "trotterkit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "trotterkit/errors.hpp"
#include "trotterkit/random.hpp"

namespace trotterkit {

namespace {

double gaussian(std::mt19937_64& rng) {
  const double u1 = uniform(rng, 0.0, 1.0);
  const double u2 = uniform(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Bisection on a in [0, hi] for dist(a) = target, dist nondecreasing-ish.
std::pair<double, double> solve_amplitude(const std::function<double(double)>& dist, double target,
                                          double hi) {
  double lo = 0.0;
  double dhi = dist(hi);
  if (dhi <= target) return {hi, dhi};
  double best_a = hi, best_d = dhi;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double d = dist(mid);
    if (std::abs(d - target) < std::abs(best_d - target)) {
      best_a = mid;
      best_d = d;
    }
    if (std::abs(d - target) <= 1e-9 * target) break;
    if (d < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {best_a, best_d};
}

Coords centroid(const PositiveMeasure& mu) {
  const std::size_t dim = mu.space()->dim();
  Coords c(dim, 0.0);
  const double mass = mu.total_mass();
  if (mass <= 0.0) return c;
  for (const auto& a : mu.atoms()) {
    for (std::size_t d = 0; d < dim; ++d) c[d] += a.weight * a.point.coords[d];
  }
  for (auto& v : c) v /= mass;
  return c;
}

}  // namespace

double dirac_distance(double d) { return 2.0 * d / (2.0 + d); }

std::vector<Perturbation> perturb(const PositiveMeasure& mu, const std::vector<double>& targets,
                                  const Metric& metric, JitterKind kind, std::uint64_t seed) {
  const SpacePtr& space = mu.space();
  if (kind == JitterKind::location && space->is_finite()) {
    throw InvalidArgument("location jitter needs a Euclidean space");
  }
  if (mu.empty()) throw InvalidArgument("cannot perturb the zero measure");
  std::vector<Perturbation> out;
  for (std::size_t p = 0; p < targets.size(); ++p) {
    const double target = targets[p];
    if (!(target >= 0.0) || !std::isfinite(target)) {
      throw InvalidArgument("perturbation targets must be finite and >= 0");
    }
    if (target == 0.0) {
      out.push_back(Perturbation{mu, 0.0, kind});
      continue;
    }
    std::mt19937_64 rng = trial_rng(seed, p);
    if (kind == JitterKind::weight) {
      std::vector<Atom> atoms;
      if (space->is_finite()) {
        const Eigen::VectorXd q = random_probability(space->size(), rng);
        for (std::size_t i = 0; i < space->size(); ++i) {
          atoms.push_back(Atom{Point::state(i), q(static_cast<Eigen::Index>(i))});
        }
      } else {
        const Eigen::VectorXd q = random_probability(mu.atoms().size(), rng);
        for (std::size_t i = 0; i < mu.atoms().size(); ++i) {
          atoms.push_back(Atom{mu.atoms()[i].point, q(static_cast<Eigen::Index>(i))});
        }
      }
      const PositiveMeasure Q = PositiveMeasure(space, atoms).scaled(mu.total_mass());
      const std::vector<PositiveMeasure> parts = {mu, Q};
      auto make = [&](double a) {
        const std::vector<double> c = {1.0 - a, a};
        return positive_combine(c, parts);
      };
      const auto [a, d] =
          solve_amplitude([&](double a) { return bl_distance(mu, make(a), metric); }, target, 1.0);
      out.push_back(Perturbation{make(a), d, kind});
    } else {
      const std::size_t dim = space->dim();
      std::vector<Coords> shifts;
      for (std::size_t i = 0; i < mu.atoms().size(); ++i) {
        Coords z(dim);
        for (auto& v : z) v = gaussian(rng);
        shifts.push_back(z);
      }
      auto make = [&](double a) {
        std::vector<Atom> atoms;
        for (std::size_t i = 0; i < mu.atoms().size(); ++i) {
          Coords x = mu.atoms()[i].point.coords;
          for (std::size_t d = 0; d < dim; ++d) x[d] += a * shifts[i][d];
          atoms.push_back(Atom{Point::at(x), mu.atoms()[i].weight});
        }
        return PositiveMeasure(space, atoms);
      };
      auto dist = [&](double a) { return bl_distance(mu, make(a), metric); };
      double hi = 1.0;
      for (int i = 0; i < 60 && dist(hi) < target; ++i) hi *= 2.0;
      const auto [a, d] = solve_amplitude(dist, target, hi);
      out.push_back(Perturbation{make(a), d, kind});
    }
  }
  return out;
}

EquicontinuityProbe make_equicontinuity_probe(PositiveMeasure center,
                                              std::vector<Perturbation> perturbations,
                                              std::vector<MarkovOperator> family, Metric metric,
                                              Execution exec) {
  if (perturbations.empty()) throw InvalidArgument("equicontinuity probe: no perturbations");
  if (family.empty()) throw InvalidArgument("equicontinuity probe: empty family");
  for (const auto& p : perturbations) {
    if (!(p.inputDistance > 0.0)) {
      throw InvalidArgument("equicontinuity probe: input distances must be positive");
    }
  }
  EquicontinuityProbe probe{std::move(center), std::move(perturbations), std::move(family),
                            std::move(metric), {}};
  const std::size_t rows = probe.perturbations.size();
  const std::size_t cols = probe.family.size();
  const auto images = map_indices(cols, exec, [&](std::size_t q) {
    return probe.family[q].apply(probe.center);
  });
  const auto cells = map_indices(rows * cols, exec, [&](std::size_t idx) {
    const std::size_t p = idx / cols;
    const std::size_t q = idx % cols;
    return bl_distance(images[q], probe.family[q].apply(probe.perturbations[p].nu), probe.metric);
  });
  probe.table.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t idx = 0; idx < rows * cols; ++idx) {
    probe.table(static_cast<Eigen::Index>(idx / cols), static_cast<Eigen::Index>(idx % cols)) = cells[idx];
  }
  return probe;
}

DistanceTable equicontinuity_modulus(const EquicontinuityProbe& probe) {
  if (probe.perturbations.empty() || probe.family.empty()) {
    throw InvalidArgument("equicontinuity_modulus: empty probe");
  }
  std::map<double, double> buckets;
  for (std::size_t p = 0; p < probe.perturbations.size(); ++p) {
    const double in = probe.perturbations[p].inputDistance;
    const double worst = probe.table.row(static_cast<Eigen::Index>(p)).maxCoeff();
    auto [it, inserted] = buckets.emplace(in, worst);
    if (!inserted) it->second = std::max(it->second, worst);
  }
  DistanceTable out;
  double run = 0.0;
  for (const auto& [in, worst] : buckets) {
    run = std::max(run, worst);
    out.input.push_back(in);
    out.output.push_back(run);
  }
  return out;
}

std::vector<MarkovOperator> trotter_family(const Semigroup& g1, const Semigroup& g2,
                                           const std::vector<double>& times,
                                           const std::vector<std::size_t>& counts) {
  std::vector<MarkovOperator> out;
  for (std::size_t n : counts) {
    for (double s : times) {
      const Semigroup a = g1;
      const Semigroup b = g2;
      out.push_back(MarkovOperator::kernel(
          g1.space(),
          [a, b, s, n](const Point& x) {
            return trotter_iterate(a, b, s, n, PositiveMeasure::dirac(a.space(), x));
          },
          "[P1 P2]^" + std::to_string(n) + " at t=" + std::to_string(s)));
    }
  }
  return out;
}

TightnessProbe tightness_probe(const std::vector<MarkovOperator>& family, const PositiveMeasure& mu,
                               const std::vector<double>& radiusGrid) {
  for (std::size_t r = 0; r < radiusGrid.size(); ++r) {
    if (!(radiusGrid[r] >= 0.0) || (r > 0 && !(radiusGrid[r] > radiusGrid[r - 1]))) {
      throw InvalidArgument("tightness radius grid must be nonnegative and increasing");
    }
  }
  TightnessProbe probe;
  probe.radiusGrid = radiusGrid;
  probe.massOutside = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(family.size()),
                                            static_cast<Eigen::Index>(radiusGrid.size()));
  for (const auto& P : family) probe.labels.push_back(P.label());
  if (mu.space()->is_finite()) return probe;
  probe.center = centroid(mu);
  for (std::size_t p = 0; p < family.size(); ++p) {
    const PositiveMeasure img = family[p].apply(mu);
    for (const auto& a : img.atoms()) {
      double r2 = 0.0;
      for (std::size_t d = 0; d < probe.center.size(); ++d) {
        const double diff = a.point.coords[d] - probe.center[d];
        r2 += diff * diff;
      }
      const double r = std::sqrt(r2);
      for (std::size_t q = 0; q < radiusGrid.size(); ++q) {
        if (r > radiusGrid[q]) {
          probe.massOutside(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) += a.weight;
        }
      }
    }
  }
  return probe;
}

SemigroupLawCheck limit_semigroup_check(const Semigroup& g1, const Semigroup& g2,
                                        const PositiveMeasure& mu, double t, double s,
                                        std::size_t nFinest, const Metric& metric, double target) {
  if (!(t >= 0.0) || !(s >= 0.0)) throw InvalidArgument("limit_semigroup_check: t, s must be >= 0");
  if (nFinest < 2) throw InvalidArgument("limit_semigroup_check: nFinest must be >= 2");
  auto est = [&](double tau, const PositiveMeasure& nu) {
    return trotter_iterate(g1, g2, tau, nFinest, nu);
  };
  SemigroupLawCheck res;
  const PositiveMeasure at_t = est(t, mu);
  res.distPower = bl_distance(est(2.0 * t, mu), est(t, at_t), metric);
  res.distAdditive = bl_distance(est(t + s, mu), est(t, est(s, mu)), metric);
  res.horizon = std::max(2.0 * t, t + s);
  res.selfConvergence = bl_distance(trotter_iterate(g1, g2, res.horizon, nFinest, mu),
                                    trotter_iterate(g1, g2, res.horizon, nFinest / 2, mu), metric);
  res.sufficient = res.selfConvergence < target;
  return res;
}

DistanceTable feller_continuity_check(const Semigroup& g1, const Semigroup& g2, double t,
                                      const PositiveMeasure& mu, const std::vector<double>& sizes,
                                      std::size_t nFinest, const Metric& metric, std::uint64_t seed,
                                      Execution exec) {
  for (double v : sizes) {
    if (!(v > 0.0)) throw InvalidArgument("feller_continuity_check: sizes must be positive");
  }
  std::vector<double> targets = {0.0};
  targets.insert(targets.end(), sizes.begin(), sizes.end());
  const JitterKind kind = mu.space()->is_finite() ? JitterKind::weight : JitterKind::location;
  const auto perts = perturb(mu, targets, metric, kind, seed);
  const PositiveMeasure base = trotter_iterate(g1, g2, t, nFinest, mu);
  const auto outputs = map_indices(perts.size(), exec, [&](std::size_t i) {
    return bl_distance(base, trotter_iterate(g1, g2, t, nFinest, perts[i].nu), metric);
  });
  DistanceTable out;
  for (std::size_t i = 0; i < perts.size(); ++i) {
    out.input.push_back(perts[i].inputDistance);
    out.output.push_back(outputs[i]);
  }
  return out;
}

DistanceTable stochastic_continuity_check(const Semigroup& g, const PositiveMeasure& mu,
                                          const std::vector<double>& hGrid, const Metric& metric,
                                          Execution exec) {
  for (std::size_t i = 0; i < hGrid.size(); ++i) {
    if (!(hGrid[i] >= 0.0) || (i > 0 && !(hGrid[i] < hGrid[i - 1]))) {
      throw InvalidArgument("stochastic_continuity_check: hGrid must be >= 0 and decreasing");
    }
  }
  DistanceTable out;
  out.input = hGrid;
  out.output = map_indices(hGrid.size(), exec, [&](std::size_t i) {
    return bl_distance(g.at_time(hGrid[i]).apply(mu), mu, metric);
  });
  return out;
}

}  // namespace trotterkit
