#pragma once

#include <Eigen/Dense>

namespace trotterkit {

/// e^A by scaling and squaring with a diagonal Padé approximant of degree
/// 3, 5, 7, 9 or 13 picked from the 1-norm of A.
Eigen::MatrixXd expm_pade(const Eigen::MatrixXd& A);

/// True if Q is square with nonnegative off-diagonal entries and zero column
/// sums (within `tol` times the largest rate).
bool is_generator(const Eigen::MatrixXd& Q, double tol = 1e-12);

/// e^{tQ} for a generator Q and t >= 0 by uniformization on a scaled step
/// followed by repeated squaring. Every term is a nonnegative matrix, so the
/// result is entrywise nonnegative by construction.
Eigen::MatrixXd expm_generator(const Eigen::MatrixXd& Q, double t);

/// Largest |column sum - 1| and most negative entry of P (0 when none).
struct StochasticDefect {
  double column_sum = 0.0;
  double negativity = 0.0;
};
StochasticDefect stochastic_defect(const Eigen::MatrixXd& P);

}  // namespace trotterkit
