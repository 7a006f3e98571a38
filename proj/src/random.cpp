#include "trotterkit/random.hpp"

#include <cmath>

#include "trotterkit/errors.hpp"

namespace trotterkit {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(seed + trial));
}

// Drawn from raw 53-bit integers so values do not depend on the standard
// library's distribution implementation.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::size_t uniform_count(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  if (hi < lo) throw InvalidArgument("uniform_count: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::size_t>(rng() % span);
}

Eigen::MatrixXd random_generator(std::size_t m, std::mt19937_64& rng, double scale) {
  const auto n = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      Q(i, j) = uniform(rng, 0.0, scale);
      sum += Q(i, j);
    }
    Q(j, j) = -sum;
  }
  return Q;
}

Eigen::VectorXd random_probability(std::size_t m, std::mt19937_64& rng) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = -std::log(1.0 - uniform(rng, 0.0, 1.0));
  return w / w.sum();
}

Eigen::MatrixXd random_metric(std::size_t m, std::mt19937_64& rng, double side) {
  const auto n = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd pts(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 1000) throw NumericalError("random_metric: could not separate points");
      pts(i, 0) = uniform(rng, 0.0, side);
      pts(i, 1) = uniform(rng, 0.0, side);
      bool ok = true;
      for (Eigen::Index j = 0; j < i && ok; ++j) ok = (pts.row(i) - pts.row(j)).norm() >= 1e-3;
      if (ok) break;
    }
  }
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) D(i, j) = (pts.row(i) - pts.row(j)).norm();
  return D;
}

}  // namespace trotterkit
