#pragma once

// Data-parallel inner loops. Each kernel exists as a serial reference and an
// OpenMP version; both produce bitwise-identical results (every output slot
// is computed by the same sequence of operations, reductions are max-only).
// The unsuffixed entry points pick the parallel version above a size cutoff.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "trotterkit/state_space.hpp"

namespace trotterkit::kernels {

/// out = P * w for a dense matrix P.
void matvec_serial(const Eigen::MatrixXd& P, const Eigen::VectorXd& w, Eigen::VectorXd& out);
void matvec_parallel(const Eigen::MatrixXd& P, const Eigen::VectorXd& w, Eigen::VectorXd& out);
void matvec(const Eigen::MatrixXd& P, const Eigen::VectorXd& w, Eigen::VectorXd& out);

/// max over i != j of |v_i - v_j| / D(i, j); 0 for fewer than two values.
double lipschitz_ratio_serial(std::span<const double> values, const Eigen::MatrixXd& D);
double lipschitz_ratio_parallel(std::span<const double> values, const Eigen::MatrixXd& D);
double lipschitz_ratio(std::span<const double> values, const Eigen::MatrixXd& D);

/// Pairwise distance matrix of `points` in `space`.
Eigen::MatrixXd pairwise_distances_serial(const StateSpace& space, std::span<const Point> points);
Eigen::MatrixXd pairwise_distances_parallel(const StateSpace& space, std::span<const Point> points);
Eigen::MatrixXd pairwise_distances(const StateSpace& space, std::span<const Point> points);

/// Exact maximum of sum_i c_i f_i over the polytope
///   |f_i| <= 1 - L,  |f_i - f_j| <= L D(i,j),  0 <= L <= 1
/// by enumerating every vertex (every choice of k+1 active constraints).
/// Cost grows combinatorially; callers cap k.
double bl_vertex_max_serial(std::span<const double> c, const Eigen::MatrixXd& D);
double bl_vertex_max_parallel(std::span<const double> c, const Eigen::MatrixXd& D);

}  // namespace trotterkit::kernels
