#include "trotterkit/identities.hpp"

#include <algorithm>
#include <initializer_list>
#include <map>
#include <tuple>

#include "trotterkit/errors.hpp"
#include "trotterkit/random.hpp"

namespace trotterkit {

namespace {

// A word is a product of factors written left to right as in operator
// notation; the rightmost factor acts on the measure first.
enum class F { p1, p2, b12, b21 };

struct Factor {
  F f;
  std::size_t q;      // time q * t / m
  std::size_t power;  // blocks only
};

using Word = std::vector<Factor>;

struct Term {
  double coeff;
  Word word;
};

using Expr = std::vector<Term>;

Word p1(std::size_t q) { return q == 0 ? Word{} : Word{{F::p1, q, 1}}; }
Word p2(std::size_t q) { return q == 0 ? Word{} : Word{{F::p2, q, 1}}; }
Word b12(std::size_t q, std::size_t power) {
  return power == 0 || q == 0 ? Word{} : Word{{F::b12, q, power}};
}
Word b21(std::size_t q, std::size_t power) {
  return power == 0 || q == 0 ? Word{} : Word{{F::b21, q, power}};
}

Word cat(std::initializer_list<Word> parts) {
  Word out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// left * (P1_q P2_q - P2_q P1_q) * right
void add_commutator(Expr& e, double sign, const Word& left, std::size_t q, const Word& right) {
  e.push_back({sign, cat({left, p1(q), p2(q), right})});
  e.push_back({-sign, cat({left, p2(q), p1(q), right})});
}

class Evaluator {
 public:
  Evaluator(const Semigroup& g1, const Semigroup& g2, double t, std::size_t m)
      : g1_(g1), g2_(g2), t_(t), m_(m),
        matrices_(g1.kind() == Semigroup::Kind::matrix_exponential &&
                  g2.kind() == Semigroup::Kind::matrix_exponential) {}

  PositiveMeasure apply(const Word& w, const PositiveMeasure& mu) {
    PositiveMeasure cur = mu;
    for (auto it = w.rbegin(); it != w.rend(); ++it) cur = apply_factor(*it, cur);
    return cur;
  }

 private:
  double time(std::size_t q) const {
    return static_cast<double>(q) * t_ / static_cast<double>(m_);
  }

  const MarkovOperator& single(int which, std::size_t q) {
    const auto key = std::make_pair(which, q);
    auto it = singles_.find(key);
    if (it == singles_.end()) {
      it = singles_.emplace(key, (which == 1 ? g1_ : g2_).at_time(time(q))).first;
    }
    return it->second;
  }

  const MarkovOperator& block_matrix(F f, std::size_t q, std::size_t power) {
    const auto key = std::make_tuple(static_cast<int>(f), q, power);
    auto it = blocks_.find(key);
    if (it == blocks_.end()) {
      const Eigen::MatrixXd& a = single(1, q).matrix();
      const Eigen::MatrixXd& b = single(2, q).matrix();
      const Eigen::MatrixXd step = f == F::b12 ? Eigen::MatrixXd(a * b) : Eigen::MatrixXd(b * a);
      Eigen::MatrixXd acc = step;
      for (std::size_t i = 1; i < power; ++i) acc = step * acc;
      it = blocks_.emplace(key, MarkovOperator::stochastic_matrix(g1_.space(), acc)).first;
    }
    return it->second;
  }

  PositiveMeasure apply_factor(const Factor& fac, const PositiveMeasure& mu) {
    switch (fac.f) {
      case F::p1:
        return single(1, fac.q).apply(mu);
      case F::p2:
        return single(2, fac.q).apply(mu);
      case F::b12:
      case F::b21: {
        if (matrices_) return block_matrix(fac.f, fac.q, fac.power).apply(mu);
        const MarkovOperator& a = single(1, fac.q);
        const MarkovOperator& b = single(2, fac.q);
        const MarkovOperator& inner = fac.f == F::b12 ? b : a;
        const MarkovOperator& outer = fac.f == F::b12 ? a : b;
        PositiveMeasure cur = mu;
        for (std::size_t i = 0; i < fac.power; ++i) cur = outer.apply(inner.apply(cur));
        return cur;
      }
    }
    throw InvalidArgument("unknown factor");
  }

  const Semigroup& g1_;
  const Semigroup& g2_;
  double t_;
  std::size_t m_;
  bool matrices_;
  std::map<std::pair<int, std::size_t>, MarkovOperator> singles_;
  std::map<std::tuple<int, std::size_t, std::size_t>, MarkovOperator> blocks_;
};

void check_common(const Semigroup& g1, const Semigroup& g2, double t,
                  const std::vector<PositiveMeasure>& tests) {
  if (!(t >= 0.0)) throw InvalidArgument("identity check: t must be >= 0");
  if (!same_space(g1.space(), g2.space())) throw SpaceMismatch("identity check: g1 and g2 differ in space");
  if (tests.empty()) throw InvalidArgument("identity check: no test measures");
  for (const auto& mu : tests) {
    if (!same_space(mu.space(), g1.space())) throw SpaceMismatch("identity check: test measure space");
  }
}

IdentityCheckResult compare(const std::string& name, const Semigroup& g1, const Semigroup& g2,
                            double t, std::size_t m, const Expr& lhs, const Expr& rhs,
                            const std::vector<PositiveMeasure>& tests) {
  Evaluator ev(g1, g2, t, m);
  IdentityCheckResult res;
  res.name = name;
  res.tolerance = identity_tolerance(*g1.space());
  const Metric metric = Metric::base(g1.space());
  for (const auto& mu : tests) {
    std::vector<double> coeffs;
    std::vector<SignedMeasure> parts;
    for (const auto& term : lhs) {
      coeffs.push_back(term.coeff);
      parts.emplace_back(ev.apply(term.word, mu));
    }
    for (const auto& term : rhs) {
      coeffs.push_back(-term.coeff);
      parts.emplace_back(ev.apply(term.word, mu));
    }
    double dev = 0.0;
    if (!parts.empty()) dev = bl_dual_norm(linear_combine(coeffs, parts), metric).value;
    res.maxDeviation = std::max(res.maxDeviation, dev);
    ++res.instances;
  }
  res.passed = res.maxDeviation <= res.tolerance;
  return res;
}

Expr lemma_c_lhs(std::size_t n, std::size_t k) {
  return {{1.0, b12(k, n)}, {-1.0, b12(1, k * n)}};
}

Expr corollary_rhs(std::size_t n, std::size_t k, bool recomposed) {
  Expr e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 1; j < k; ++j) {
      for (std::size_t l = 0; l < j; ++l) {
        const Word left = cat({b12(k, i), p1(j), p2(l)});
        const Word right = recomposed
                               ? cat({p2(j - 1 - l), p2(1), b12(1, k - 1 - j), b12(1, k * (n - 1 - i))})
                               : cat({p2(j - l), b12(1, k * (n - i) - j - 1)});
        add_commutator(e, 1.0, left, 1, right);
      }
    }
  }
  return e;
}

}  // namespace

double identity_tolerance(const StateSpace& space) {
  return space.is_finite() ? kMatrixIdentityTolerance : kLiftIdentityTolerance;
}

std::vector<PositiveMeasure> identity_test_panel(const SpacePtr& space, std::uint64_t seed) {
  if (!space->is_finite()) throw InvalidArgument("identity_test_panel: finite spaces only");
  const std::size_t m = space->size();
  std::vector<PositiveMeasure> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(PositiveMeasure::dirac(space, Point::state(i)));
  out.push_back(PositiveMeasure::from_weights(
      space, Eigen::VectorXd(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m)))));
  std::mt19937_64 rng(splitmix64(seed));
  for (int r = 0; r < 3; ++r) out.push_back(PositiveMeasure::from_weights(space, random_probability(m, rng)));
  return out;
}

IdentityCheckResult check_lemma_a(const Semigroup& g1, const Semigroup& g2, double t, std::size_t m,
                                  std::size_t j, const std::vector<PositiveMeasure>& tests) {
  check_common(g1, g2, t, tests);
  if (m == 0 || j == 0 || j > m) throw InvalidArgument("check_lemma_a: need 1 <= j <= m");
  const Expr lhs = {{1.0, cat({p1(1), p2(j)})}, {-1.0, cat({p2(j), p1(1)})}};
  Expr rhs;
  for (std::size_t l = 0; l < j; ++l) add_commutator(rhs, 1.0, p2(l), 1, p2(j - 1 - l));
  return compare("lemma_a", g1, g2, t, m, lhs, rhs, tests);
}

IdentityCheckResult check_lemma_b(const Semigroup& g1, const Semigroup& g2, double t, std::size_t m,
                                  std::size_t k, const std::vector<PositiveMeasure>& tests) {
  check_common(g1, g2, t, tests);
  if (m == 0 || k == 0 || k > m) throw InvalidArgument("check_lemma_b: need 1 <= k <= m");
  const Expr lhs = {{1.0, cat({p1(k), p2(k)})}, {-1.0, b12(1, k)}};
  Expr rhs;
  for (std::size_t j = 1; j < k; ++j) {
    rhs.push_back({1.0, cat({p1(j), p1(1), p2(j), p2(1), b12(1, k - 1 - j)})});
    rhs.push_back({-1.0, cat({p1(j), p2(j), p1(1), p2(1), b12(1, k - 1 - j)})});
  }
  return compare("lemma_b", g1, g2, t, m, lhs, rhs, tests);
}

IdentityCheckResult check_lemma_c(const Semigroup& g1, const Semigroup& g2, double t, std::size_t n,
                                  std::size_t k, const std::vector<PositiveMeasure>& tests) {
  check_common(g1, g2, t, tests);
  if (n == 0 || k == 0) throw InvalidArgument("check_lemma_c: need n, k >= 1");
  Expr rhs;
  for (std::size_t i = 0; i < n; ++i) {
    const Word left = b12(k, i);
    const Word right = b12(1, k * (n - 1 - i));
    rhs.push_back({1.0, cat({left, b12(k, 1), right})});
    rhs.push_back({-1.0, cat({left, b12(1, k), right})});
  }
  return compare("lemma_c", g1, g2, t, n * k, lemma_c_lhs(n, k), rhs, tests);
}

IdentityCheckResult check_corollary(const Semigroup& g1, const Semigroup& g2, double t, std::size_t n,
                                    std::size_t k, const std::vector<PositiveMeasure>& tests) {
  check_common(g1, g2, t, tests);
  if (n == 0 || k == 0) throw InvalidArgument("check_corollary: need n, k >= 1");
  return compare("corollary", g1, g2, t, n * k, lemma_c_lhs(n, k), corollary_rhs(n, k, false), tests);
}

IdentityCheckResult check_corollary_recomposed(const Semigroup& g1, const Semigroup& g2, double t,
                                               std::size_t n, std::size_t k,
                                               const std::vector<PositiveMeasure>& tests) {
  check_common(g1, g2, t, tests);
  if (n == 0 || k == 0) throw InvalidArgument("check_corollary_recomposed: need n, k >= 1");
  return compare("corollary_recomposed", g1, g2, t, n * k, lemma_c_lhs(n, k),
                 corollary_rhs(n, k, true), tests);
}

IdentityCheckResult corollary_displayed_vs_recomposed(const Semigroup& g1, const Semigroup& g2,
                                                      double t, std::size_t n, std::size_t k,
                                                      const std::vector<PositiveMeasure>& tests) {
  check_common(g1, g2, t, tests);
  if (n == 0 || k == 0) throw InvalidArgument("corollary_displayed_vs_recomposed: need n, k >= 1");
  return compare("corollary_displayed_vs_recomposed", g1, g2, t, n * k, corollary_rhs(n, k, false),
                 corollary_rhs(n, k, true), tests);
}

std::array<IdentityCheckResult, 2> check_swap_identity(const Semigroup& g1, const Semigroup& g2,
                                                       double t, std::size_t n,
                                                       const std::vector<PositiveMeasure>& tests) {
  check_common(g1, g2, t, tests);
  if (n == 0) throw InvalidArgument("check_swap_identity: need n >= 1");
  const Expr lhs = {{1.0, b12(1, n)}, {-1.0, b21(1, n)}};
  Expr form0, form1;
  for (std::size_t i = 0; i < n; ++i) {
    add_commutator(form0, 1.0, b21(1, n - i - 1), 1, b12(1, i));
    add_commutator(form1, 1.0, b12(1, n - i - 1), 1, b21(1, i));
  }
  return {compare("swap_form_1", g1, g2, t, 1, lhs, form0, tests),
          compare("swap_form_2", g1, g2, t, 1, lhs, form1, tests)};
}

IdentityInstance random_identity_instance(std::uint64_t seed, std::uint64_t trial,
                                          std::size_t max_states) {
  if (max_states < 2) throw InvalidArgument("identity instances need max_states >= 2");
  std::mt19937_64 rng = trial_rng(seed, trial);
  IdentityInstance inst;
  inst.seed = seed;
  inst.trial = trial;
  inst.states = uniform_count(rng, 2, max_states);
  inst.dist = random_metric(inst.states, rng);
  inst.Q1 = random_generator(inst.states, rng);
  inst.Q2 = random_generator(inst.states, rng);
  inst.t = uniform(rng, 0.1, 2.0);
  inst.n = uniform_count(rng, 1, 8);
  inst.k = uniform_count(rng, 1, 8);
  inst.j = uniform_count(rng, 1, inst.n * inst.k);
  return inst;
}

InstanceReport run_identity_instance(const IdentityInstance& inst) {
  const SpacePtr space = StateSpace::finite(inst.dist);
  const Semigroup g1 = Semigroup::generator(space, inst.Q1);
  const Semigroup g2 = Semigroup::generator(space, inst.Q2);
  const auto tests = identity_test_panel(space, inst.seed + inst.trial + 1);
  const std::size_t m = inst.n * inst.k;

  InstanceReport rep;
  rep.instance = inst;
  rep.results.push_back(check_lemma_a(g1, g2, inst.t, m, inst.j, tests));
  rep.results.push_back(check_lemma_b(g1, g2, inst.t, m, inst.k, tests));
  rep.results.push_back(check_lemma_c(g1, g2, inst.t, inst.n, inst.k, tests));
  rep.results.push_back(check_corollary(g1, g2, inst.t, inst.n, inst.k, tests));
  rep.results.push_back(check_corollary_recomposed(g1, g2, inst.t, inst.n, inst.k, tests));
  rep.results.push_back(corollary_displayed_vs_recomposed(g1, g2, inst.t, inst.n, inst.k, tests));
  for (auto& r : check_swap_identity(g1, g2, inst.t, inst.n, tests)) rep.results.push_back(r);
  rep.passed = std::all_of(rep.results.begin(), rep.results.end(),
                           [](const IdentityCheckResult& r) { return r.passed; });
  return rep;
}

std::vector<InstanceReport> run_identity_suite(std::uint64_t seed, std::size_t trials,
                                               std::size_t max_states, Execution exec) {
  if (trials == 0) throw InvalidArgument("identity suite needs trials >= 1");
  return map_indices(trials, exec, [&](std::size_t i) {
    return run_identity_instance(random_identity_instance(seed, i, max_states));
  });
}

}  // namespace trotterkit
