#include "trotterkit/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "trotterkit/errors.hpp"
#include "trotterkit/parallel.hpp"

namespace trotterkit::kernels {

namespace {

constexpr Eigen::Index kParallelRows = 256;
constexpr std::size_t kParallelPoints = 128;

double matvec_row(const Eigen::MatrixXd& P, const Eigen::VectorXd& w, Eigen::Index i) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < P.cols(); ++j) s += P(i, j) * w(j);
  return s;
}

double lipschitz_row(std::span<const double> v, const Eigen::MatrixXd& D, std::size_t i) {
  double best = 0.0;
  for (std::size_t j = i + 1; j < v.size(); ++j) {
    const double d = D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    best = std::max(best, std::abs(v[i] - v[j]) / d);
  }
  return best;
}

// Constraint system for the vertex enumeration: rows a . y <= rhs over
// y = (f_1, ..., f_k, L).
struct Halfspaces {
  std::size_t vars = 0;
  std::vector<double> a;  // row-major, rows x vars
  std::vector<double> rhs;
  std::size_t rows() const { return rhs.size(); }
  const double* row(std::size_t r) const { return a.data() + r * vars; }
};

Halfspaces bl_halfspaces(std::size_t k, const Eigen::MatrixXd& D) {
  Halfspaces h;
  h.vars = k + 1;
  auto add = [&](std::vector<double> row, double b) {
    h.a.insert(h.a.end(), row.begin(), row.end());
    h.rhs.push_back(b);
  };
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> up(h.vars, 0.0), down(h.vars, 0.0);
    up[i] = 1.0;
    up[k] = 1.0;
    down[i] = -1.0;
    down[k] = 1.0;
    add(up, 1.0);
    add(down, 1.0);
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      std::vector<double> row(h.vars, 0.0);
      row[i] = 1.0;
      row[j] = -1.0;
      row[k] = -D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      add(row, 0.0);
    }
  {
    std::vector<double> lo(h.vars, 0.0), hi(h.vars, 0.0);
    lo[k] = -1.0;
    hi[k] = 1.0;
    add(lo, 0.0);
    add(hi, 1.0);
  }
  return h;
}

constexpr std::size_t kMaxVars = 8;

// Solves the square system picked by `idx`; false if (numerically) singular.
bool solve_active(const Halfspaces& h, const std::array<std::size_t, kMaxVars>& idx,
                  std::array<double, kMaxVars>& y) {
  const std::size_t n = h.vars;
  std::array<double, kMaxVars * (kMaxVars + 1)> m{};
  const std::size_t w = n + 1;
  for (std::size_t r = 0; r < n; ++r) {
    const double* src = h.row(idx[r]);
    for (std::size_t c = 0; c < n; ++c) m[r * w + c] = src[c];
    m[r * w + n] = h.rhs[idx[r]];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(m[col * w + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(m[r * w + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < 1e-12) return false;
    if (piv != col)
      for (std::size_t c = 0; c < w; ++c) std::swap(m[col * w + c], m[piv * w + c]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r * w + col] / m[col * w + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < w; ++c) m[r * w + c] -= f * m[col * w + c];
    }
  }
  for (std::size_t r = n; r-- > 0;) {
    double s = m[r * w + n];
    for (std::size_t c = r + 1; c < n; ++c) s -= m[r * w + c] * y[c];
    y[r] = s / m[r * w + r];
  }
  return true;
}

bool feasible(const Halfspaces& h, const std::array<double, kMaxVars>& y) {
  for (std::size_t r = 0; r < h.rows(); ++r) {
    const double* a = h.row(r);
    double s = 0.0;
    for (std::size_t c = 0; c < h.vars; ++c) s += a[c] * y[c];
    if (s > h.rhs[r] + 1e-9) return false;
  }
  return true;
}

// Best objective over all vertices whose first active constraint is `first`.
double vertices_with_first(const Halfspaces& h, std::span<const double> c, std::size_t first) {
  const std::size_t n = h.vars;
  const std::size_t R = h.rows();
  double best = -std::numeric_limits<double>::infinity();
  if (R - first < n) return best;
  std::array<std::size_t, kMaxVars> idx{};
  idx[0] = first;
  for (std::size_t r = 1; r < n; ++r) idx[r] = first + r;
  std::array<double, kMaxVars> y{};
  while (true) {
    if (solve_active(h, idx, y)) {
      double obj = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) obj += c[i] * y[i];
      if (obj > best && feasible(h, y)) best = obj;
    }
    // Advance the tail idx[1..n-1] to the next combination.
    std::size_t pos = n - 1;
    while (pos >= 1 && idx[pos] == R - n + pos) --pos;
    if (pos == 0) break;
    ++idx[pos];
    for (std::size_t r = pos + 1; r < n; ++r) idx[r] = idx[r - 1] + 1;
  }
  return best;
}

void check_vertex_input(std::span<const double> c, const Eigen::MatrixXd& D) {
  if (c.size() + 1 > kMaxVars) throw InvalidArgument("vertex enumeration supports at most 7 atoms");
  if (static_cast<std::size_t>(D.rows()) != c.size() || D.rows() != D.cols())
    throw InvalidArgument("vertex enumeration: distance matrix does not match the weights");
}

}  // namespace

void matvec_serial(const Eigen::MatrixXd& P, const Eigen::VectorXd& w, Eigen::VectorXd& out) {
  out.resize(P.rows());
  for (Eigen::Index i = 0; i < P.rows(); ++i) out(i) = matvec_row(P, w, i);
}

void matvec_parallel(const Eigen::MatrixXd& P, const Eigen::VectorXd& w, Eigen::VectorXd& out) {
  out.resize(P.rows());
  const Eigen::Index rows = P.rows();
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (Eigen::Index i = 0; i < rows; ++i) out(i) = matvec_row(P, w, i);
}

void matvec(const Eigen::MatrixXd& P, const Eigen::VectorXd& w, Eigen::VectorXd& out) {
  if (P.rows() >= kParallelRows) {
    matvec_parallel(P, w, out);
  } else {
    matvec_serial(P, w, out);
  }
}

double lipschitz_ratio_serial(std::span<const double> values, const Eigen::MatrixXd& D) {
  double best = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) best = std::max(best, lipschitz_row(values, D, i));
  return best;
}

double lipschitz_ratio_parallel(std::span<const double> values, const Eigen::MatrixXd& D) {
  double best = 0.0;
  const auto n = static_cast<long long>(values.size());
#pragma omp parallel for schedule(dynamic, 8) reduction(max : best) num_threads(worker_count())
  for (long long i = 0; i < n; ++i)
    best = std::max(best, lipschitz_row(values, D, static_cast<std::size_t>(i)));
  return best;
}

double lipschitz_ratio(std::span<const double> values, const Eigen::MatrixXd& D) {
  return values.size() >= kParallelPoints ? lipschitz_ratio_parallel(values, D)
                                          : lipschitz_ratio_serial(values, D);
}

Eigen::MatrixXd pairwise_distances_serial(const StateSpace& space, std::span<const Point> points) {
  const auto k = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j)
      D(i, j) = D(j, i) = space.distance(points[static_cast<std::size_t>(i)],
                                         points[static_cast<std::size_t>(j)]);
  return D;
}

Eigen::MatrixXd pairwise_distances_parallel(const StateSpace& space, std::span<const Point> points) {
  const auto k = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(k, k);
#pragma omp parallel for schedule(dynamic, 8) num_threads(worker_count())
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j)
      D(i, j) = D(j, i) = space.distance(points[static_cast<std::size_t>(i)],
                                         points[static_cast<std::size_t>(j)]);
  return D;
}

Eigen::MatrixXd pairwise_distances(const StateSpace& space, std::span<const Point> points) {
  return points.size() >= kParallelPoints ? pairwise_distances_parallel(space, points)
                                          : pairwise_distances_serial(space, points);
}

double bl_vertex_max_serial(std::span<const double> c, const Eigen::MatrixXd& D) {
  check_vertex_input(c, D);
  if (c.empty()) return 0.0;
  const auto h = bl_halfspaces(c.size(), D);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t first = 0; first < h.rows(); ++first)
    best = std::max(best, vertices_with_first(h, c, first));
  return std::max(best, 0.0);
}

double bl_vertex_max_parallel(std::span<const double> c, const Eigen::MatrixXd& D) {
  check_vertex_input(c, D);
  if (c.empty()) return 0.0;
  const auto h = bl_halfspaces(c.size(), D);
  double best = -std::numeric_limits<double>::infinity();
  const auto rows = static_cast<long long>(h.rows());
#pragma omp parallel for schedule(dynamic, 1) reduction(max : best) num_threads(worker_count())
  for (long long first = 0; first < rows; ++first)
    best = std::max(best, vertices_with_first(h, c, static_cast<std::size_t>(first)));
  return std::max(best, 0.0);
}

}  // namespace trotterkit::kernels
