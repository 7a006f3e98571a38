#include "trotterkit/expm.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "trotterkit/errors.hpp"

namespace trotterkit {

namespace {

double norm1(const Eigen::MatrixXd& A) { return A.cwiseAbs().colwise().sum().maxCoeff(); }

template <std::size_t N>
void pade_terms(const Eigen::MatrixXd& A, const std::array<double, N>& b, Eigen::MatrixXd& U,
                Eigen::MatrixXd& V) {
  const auto n = A.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd A2 = A * A;
  Eigen::MatrixXd odd = b[1] * I;
  Eigen::MatrixXd even = b[0] * I;
  Eigen::MatrixXd power = I;
  for (std::size_t k = 2; k < N; k += 2) {
    power = power * A2;
    even += b[k] * power;
    if (k + 1 < N) odd += b[k + 1] * power;
  }
  U = A * odd;
  V = even;
}

void pade13(const Eigen::MatrixXd& A, Eigen::MatrixXd& U, Eigen::MatrixXd& V) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  const auto n = A.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd A2 = A * A;
  const Eigen::MatrixXd A4 = A2 * A2;
  const Eigen::MatrixXd A6 = A4 * A2;
  const Eigen::MatrixXd tmp_u = b[13] * A6 + b[11] * A4 + b[9] * A2;
  U = A * (A6 * tmp_u + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  const Eigen::MatrixXd tmp_v = b[12] * A6 + b[10] * A4 + b[8] * A2;
  V = A6 * tmp_v + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

}  // namespace

Eigen::MatrixXd expm_pade(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw InvalidArgument("expm_pade: matrix must be square");
  if (!A.allFinite()) throw InvalidArgument("expm_pade: matrix has non-finite entries");
  const auto n = A.rows();
  if (n == 0) return A;
  const double nrm = norm1(A);
  Eigen::MatrixXd U, V;
  int squarings = 0;
  if (nrm <= 1.495585217958292e-2) {
    pade_terms(A, std::array<double, 4>{120.0, 60.0, 12.0, 1.0}, U, V);
  } else if (nrm <= 2.539398330063230e-1) {
    pade_terms(A, std::array<double, 6>{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0}, U, V);
  } else if (nrm <= 9.504178996162932e-1) {
    pade_terms(A,
               std::array<double, 8>{17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0,
                                     56.0, 1.0},
               U, V);
  } else if (nrm <= 2.097847961257068) {
    pade_terms(A,
               std::array<double, 10>{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                      30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0},
               U, V);
  } else {
    constexpr double theta13 = 5.371920351148152;
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / theta13))));
    pade13(A / std::ldexp(1.0, squarings), U, V);
  }
  Eigen::MatrixXd R = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < squarings; ++i) R = R * R;
  return R;
}

bool is_generator(const Eigen::MatrixXd& Q, double tol) {
  if (Q.rows() != Q.cols() || Q.rows() == 0 || !Q.allFinite()) return false;
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < Q.cols(); ++j) {
    for (Eigen::Index i = 0; i < Q.rows(); ++i)
      if (i != j && Q(i, j) < 0.0) return false;
    if (std::abs(Q.col(j).sum()) > tol * scale) return false;
  }
  return true;
}

Eigen::MatrixXd expm_generator(const Eigen::MatrixXd& Q, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("expm_generator: need finite t >= 0");
  if (!is_generator(Q)) throw InvalidArgument("expm_generator: Q is not a generator");
  const auto n = Q.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  double rate = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) rate = std::max(rate, -Q(i, i));
  if (t == 0.0 || rate == 0.0) return I;

  // Step h = t / 2^s with rate * h <= 1/2.
  int squarings = 0;
  double h = t;
  while (rate * h > 0.5) {
    h *= 0.5;
    ++squarings;
  }
  // R = I + Q / rate is column-stochastic with nonnegative entries (the
  // diagonal uses the exact off-diagonal column sums to stay nonnegative).
  Eigen::MatrixXd R = Q / rate;
  for (Eigen::Index j = 0; j < n; ++j) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j) off += R(i, j);
    R(j, j) = std::max(0.0, 1.0 - off);
  }
  const double lam = rate * h;
  Eigen::MatrixXd term = I;
  double weight = std::exp(-lam);
  Eigen::MatrixXd P = weight * I;
  double accumulated = weight;
  for (int k = 1; k < 200; ++k) {
    term = R * term;
    weight *= lam / k;
    P += weight * term;
    accumulated += weight;
    if (weight < 1e-18 * accumulated) break;
  }
  for (int i = 0; i < squarings; ++i) P = P * P;
  return P;
}

StochasticDefect stochastic_defect(const Eigen::MatrixXd& P) {
  StochasticDefect d;
  for (Eigen::Index j = 0; j < P.cols(); ++j) {
    d.column_sum = std::max(d.column_sum, std::abs(P.col(j).sum() - 1.0));
    for (Eigen::Index i = 0; i < P.rows(); ++i) d.negativity = std::max(d.negativity, -P(i, j));
  }
  return d;
}

}  // namespace trotterkit
