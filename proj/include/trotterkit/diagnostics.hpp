#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trotterkit/parallel.hpp"
#include "trotterkit/splitting.hpp"

namespace trotterkit {

enum class JitterKind { weight, location };

struct Perturbation {
  PositiveMeasure nu;
  double inputDistance = 0.0;
  JitterKind kind = JitterKind::weight;
};

/// One perturbation of mu per target distance, found by bisection on the
/// jitter amplitude. Weight jitter mixes mu with a Dirichlet reweighting
/// (over every state on finite spaces, over mu's atoms otherwise); location
/// jitter shifts each atom by amplitude times a Gaussian vector (Euclidean
/// only). A target of 0 yields nu = mu. When a target is out of reach the
/// largest attainable perturbation is returned with its actual distance.
std::vector<Perturbation> perturb(const PositiveMeasure& mu, const std::vector<double>& targets,
                                  const Metric& metric, JitterKind kind, std::uint64_t seed);

struct EquicontinuityProbe {
  PositiveMeasure center;
  std::vector<Perturbation> perturbations;
  std::vector<MarkovOperator> family;
  Metric metric;
  /// table(p, q) = ||P_q center - P_q nu_p||*.
  Eigen::MatrixXd table;
};

EquicontinuityProbe make_equicontinuity_probe(PositiveMeasure center,
                                              std::vector<Perturbation> perturbations,
                                              std::vector<MarkovOperator> family, Metric metric,
                                              Execution exec = Execution::parallel);

struct DistanceTable {
  std::vector<double> input;
  std::vector<double> output;
};

/// Worst output distance per input-distance bucket, ascending in input, made
/// nondecreasing by a running maximum.
DistanceTable equicontinuity_modulus(const EquicontinuityProbe& probe);

/// [P1_{s/n} P2_{s/n}]^n for n in `counts` and s in `times`, each as a kernel
/// operator.
std::vector<MarkovOperator> trotter_family(const Semigroup& g1, const Semigroup& g2,
                                           const std::vector<double>& times,
                                           const std::vector<std::size_t>& counts);

struct TightnessProbe {
  std::vector<std::string> labels;
  std::vector<double> radiusGrid;
  /// massOutside(p, r): mass of P_p mu outside the ball of radius R_r.
  Eigen::MatrixXd massOutside;
  Coords center;
};

/// Balls are centred on the centroid of mu. Finite spaces give all zeros.
/// radiusGrid must be nonnegative and increasing.
TightnessProbe tightness_probe(const std::vector<MarkovOperator>& family, const PositiveMeasure& mu,
                               const std::vector<double>& radiusGrid);

struct SemigroupLawCheck {
  double distPower = 0.0;
  double distAdditive = 0.0;
  double selfConvergence = 0.0;
  double horizon = 0.0;
  /// selfConvergence below the caller's target; informational only.
  bool sufficient = true;
};

/// Estimates are the nFinest Trotter iterates. distPower compares the
/// estimate at 2t with the estimate at t applied twice; distAdditive compares
/// t + s with t after s. selfConvergence is measured at max(2t, t + s).
SemigroupLawCheck limit_semigroup_check(const Semigroup& g1, const Semigroup& g2,
                                        const PositiveMeasure& mu, double t, double s,
                                        std::size_t nFinest, const Metric& metric,
                                        double target = 1e-2);

/// Row 0 has input 0 (nu = mu); one row per perturbation size after that.
DistanceTable feller_continuity_check(const Semigroup& g1, const Semigroup& g2, double t,
                                      const PositiveMeasure& mu, const std::vector<double>& sizes,
                                      std::size_t nFinest, const Metric& metric, std::uint64_t seed,
                                      Execution exec = Execution::parallel);

/// h -> ||P_h mu - mu||*. hGrid nonnegative and strictly decreasing.
DistanceTable stochastic_continuity_check(const Semigroup& g, const PositiveMeasure& mu,
                                          const std::vector<double>& hGrid, const Metric& metric,
                                          Execution exec = Execution::parallel);

/// 2d / (2 + d).
double dirac_distance(double d);

}  // namespace trotterkit
