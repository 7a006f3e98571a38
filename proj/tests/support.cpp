#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <unsupported/Eigen/MatrixFunctions>

#include "trotterkit/random.hpp"

namespace testing {

using namespace trotterkit;

std::string scenario_path(const std::string& name) {
  return std::string(TROTTERKIT_SCENARIO_DIR) + "/" + name;
}

std::string data_path(const std::string& name) {
  return std::string(TROTTERKIT_TEST_DATA_DIR) + "/" + name;
}

SpacePtr random_space(std::size_t m, std::mt19937_64& rng) {
  return StateSpace::finite(random_metric(m, rng));
}

SignedMeasure random_signed(const SpacePtr& space, std::size_t atoms, std::mt19937_64& rng) {
  std::vector<Atom> list;
  for (std::size_t i = 0; i < atoms; ++i) {
    list.push_back(Atom{Point::state(uniform_count(rng, 0, space->size() - 1)), uniform(rng, -1.0, 1.0)});
  }
  return SignedMeasure::from_atoms(space, std::move(list));
}

double grid_search_bl(const std::vector<double>& c, const Eigen::MatrixXd& D, double step) {
  const std::size_t k = c.size();
  const auto cells = static_cast<long>(std::lround(2.0 / step));
  std::vector<double> f(k, 0.0);
  double best = 0.0;
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    if (i == k) {
      double sup = 0.0, lip = 0.0, value = 0.0;
      for (std::size_t a = 0; a < k; ++a) {
        sup = std::max(sup, std::abs(f[a]));
        value += c[a] * f[a];
        for (std::size_t b = a + 1; b < k; ++b) {
          lip = std::max(lip, std::abs(f[a] - f[b]) / D(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        }
      }
      if (sup + lip <= 1.0 + 1e-12) best = std::max(best, value);
      return;
    }
    for (long g = 0; g <= cells; ++g) {
      f[i] = -1.0 + static_cast<double>(g) * step;
      visit(i + 1);
    }
  };
  visit(0);
  return best;
}

Eigen::MatrixXd expm_reference(const Eigen::MatrixXd& A) { return A.exp(); }

double dirac_formula(double d) { return 2.0 * d / (2.0 + d); }

}  // namespace testing
