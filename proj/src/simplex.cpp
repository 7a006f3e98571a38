#include "trotterkit/simplex.hpp"

#include <cmath>
#include <limits>

#include "trotterkit/errors.hpp"

namespace trotterkit::lp {

namespace {

constexpr double kCostTol = 1e-11;
constexpr double kPivotTol = 1e-12;
constexpr int kDegenerateRunBeforeBland = 32;

class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
          const Eigen::VectorXd& tie)
      : m_(A.rows()), n_(A.cols()), cols_(n_ + m_ + 1),
        t_(Eigen::MatrixXd::Zero(m_ + 2, cols_)), basis_(static_cast<std::size_t>(m_)) {
    t_.block(0, 0, m_, n_) = A;
    t_.block(0, n_, m_, m_).setIdentity();
    t_.col(cols_ - 1).head(m_) = b;
    // Objective rows hold reduced costs z_j - c_j; a negative entry improves.
    t_.row(m_).head(n_) = -c.transpose();
    t_.row(m_ + 1).head(n_) = -tie.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
  }

  // Runs simplex on objective row `obj`. When `lock_primary` is set only
  // columns whose primary reduced cost is zero may enter.
  int optimize(Eigen::Index obj, bool lock_primary) {
    int pivots = 0;
    int degenerate_run = 0;
    const int max_pivots = 50 * static_cast<int>(m_ + n_) + 1000;
    while (true) {
      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      Eigen::Index enter = -1;
      double best = -kCostTol;
      for (Eigen::Index j = 0; j < cols_ - 1; ++j) {
        if (lock_primary && std::abs(t_(m_, j)) > kCostTol) continue;
        const double r = t_(obj, j);
        if (r < -kCostTol) {
          if (bland) {
            enter = j;
            break;
          }
          if (r < best) {
            best = r;
            enter = j;
          }
        }
      }
      if (enter < 0) return pivots;

      Eigen::Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double a = t_(i, enter);
        if (a <= kPivotTol) continue;
        const double r = t_(i, cols_ - 1) / a;
        if (r < ratio - 1e-14 ||
            (r <= ratio + 1e-14 && leave >= 0 &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          ratio = std::min(ratio, r);
          leave = i;
        }
      }
      if (leave < 0) throw NumericalError("linear program is unbounded");
      degenerate_run = (ratio <= 1e-14) ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      if (++pivots > max_pivots) throw NumericalError("simplex pivot limit exceeded");
    }
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const auto j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) x(j) = std::max(0.0, t_(i, cols_ - 1));
    }
    return x;
  }

 private:
  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    // Keep the right-hand side feasible against roundoff.
    for (Eigen::Index i = 0; i < m_; ++i)
      if (t_(i, cols_ - 1) < 0.0 && t_(i, cols_ - 1) > -1e-13) t_(i, cols_ - 1) = 0.0;
    basis_[static_cast<std::size_t>(row)] = col;
  }

  Eigen::Index m_, n_, cols_;
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

Solution maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  const std::optional<Eigen::VectorXd>& tie_break) {
  if (A.rows() != b.size() || A.cols() != c.size())
    throw InvalidArgument("lp::maximize: inconsistent dimensions");
  if (tie_break && tie_break->size() != c.size())
    throw InvalidArgument("lp::maximize: tie-break objective has the wrong length");
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (!(b(i) >= 0.0)) throw InvalidArgument("lp::maximize: right-hand side must be >= 0");

  const Eigen::VectorXd tie = tie_break ? *tie_break : Eigen::VectorXd::Zero(c.size());
  Tableau tab(A, b, c, tie);
  Solution sol;
  sol.pivots = tab.optimize(A.rows(), false);
  if (tie_break) sol.pivots += tab.optimize(A.rows() + 1, true);
  sol.x = tab.primal();
  sol.objective = c.dot(sol.x);
  return sol;
}

}  // namespace trotterkit::lp
