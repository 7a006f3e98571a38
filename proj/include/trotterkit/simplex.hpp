#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace trotterkit::lp {

/// Result of a dense simplex solve.
struct Solution {
  Eigen::VectorXd x;
  double objective = 0.0;
  int pivots = 0;
};

/// Maximizes c'x subject to A x <= b, x >= 0, where b >= 0 so the origin is
/// a feasible starting vertex.
///
/// When `tie_break` is given, the solver continues pivoting among the
/// primal-optimal vertices to maximize tie_break'x without giving up any of
/// the primary objective (lexicographic optimum).
///
/// Dense tableau, Dantzig pricing with a switch to Bland's rule after a run of
/// degenerate pivots. Meant for the small problems this library produces
/// (tens to a few hundred rows).
Solution maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  const std::optional<Eigen::VectorXd>& tie_break = std::nullopt);

}  // namespace trotterkit::lp
