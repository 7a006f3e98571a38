#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trotterkit/measure.hpp"
#include "trotterkit/state_space.hpp"

namespace testing {

std::string scenario_path(const std::string& name);
std::string data_path(const std::string& name);

/// Random metric space of m planar points.
trotterkit::SpacePtr random_space(std::size_t m, std::mt19937_64& rng);

/// Signed measure with `atoms` random states and weights in [-1, 1].
trotterkit::SignedMeasure random_signed(const trotterkit::SpacePtr& space, std::size_t atoms,
                                        std::mt19937_64& rng);

/// Brute force over f on a grid of the given step in [-1, 1]^k, keeping the
/// points with max|f| + max|f_i - f_j| / D_ij <= 1. A lower bound on the BL
/// dual norm; support sizes up to 3.
double grid_search_bl(const std::vector<double>& c, const Eigen::MatrixXd& D, double step);

/// e^A by Eigen's MatrixFunctions module.
Eigen::MatrixXd expm_reference(const Eigen::MatrixXd& A);

/// Closed-form BL distance between two Dirac masses at distance d.
double dirac_formula(double d);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace testing
