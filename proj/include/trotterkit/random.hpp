#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "trotterkit/state_space.hpp"

namespace trotterkit {

std::uint64_t splitmix64(std::uint64_t x);

/// Generator for trial `trial` of a run seeded with `seed`.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial);

double uniform(std::mt19937_64& rng, double lo, double hi);
std::size_t uniform_count(std::mt19937_64& rng, std::size_t lo, std::size_t hi);

/// Random generator matrix (columns sum to zero) with off-diagonal rates in
/// [0, scale).
Eigen::MatrixXd random_generator(std::size_t m, std::mt19937_64& rng, double scale = 1.0);

/// Random probability vector of length m (normalized exponentials).
Eigen::VectorXd random_probability(std::size_t m, std::mt19937_64& rng);

/// Distances between m random points of the square [0, side]^2, which is a
/// metric as long as no two points coincide (retried until they are 1e-3 apart).
Eigen::MatrixXd random_metric(std::size_t m, std::mt19937_64& rng, double side = 4.0);

}  // namespace trotterkit
