#include "trotterkit/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "trotterkit/errors.hpp"
#include "trotterkit/expm.hpp"
#include "trotterkit/random.hpp"

namespace trotterkit {

namespace {

constexpr double kGridRelTol = 1e-12;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

unsigned log2_exact(std::size_t n) {
  unsigned k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

const MarkovOperator& first_factor(Order order, const MarkovOperator& p1, const MarkovOperator& p2) {
  return order == Order::g1_first ? p2 : p1;
}

const MarkovOperator& second_factor(Order order, const MarkovOperator& p1, const MarkovOperator& p2) {
  return order == Order::g1_first ? p1 : p2;
}

double commutator_norm(const Semigroup& g1, const Semigroup& g2, const PositiveMeasure& mu,
                       double s, const Metric& metric) {
  const MarkovOperator p1 = g1.at_time(s);
  const MarkovOperator p2 = g2.at_time(s);
  const PositiveMeasure a = p1.apply(p2.apply(mu));
  const PositiveMeasure b = p2.apply(p1.apply(mu));
  const double raw = bl_distance(a, b, metric);
  if (raw <= kCommutatorNoiseFloor * std::max(1.0, tv_norm(mu))) return 0.0;
  return raw;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

void validate(const SplittingStudy& study) {
  if (!(study.t >= 0.0) || !std::isfinite(study.t)) {
    throw InvalidArgument("study horizon t must be finite and >= 0");
  }
  if (study.schedule.empty()) throw InvalidArgument("schedule is empty");
  if (study.schedule.front() == 0) throw InvalidArgument("schedule entries must be >= 1");
  for (std::size_t i = 1; i < study.schedule.size(); ++i) {
    if (study.schedule[i] <= study.schedule[i - 1]) {
      throw InvalidArgument("schedule must be strictly increasing");
    }
  }
  if (!same_space(study.g1.space(), study.g2.space()) ||
      !same_space(study.g1.space(), study.mu0.space())) {
    throw SpaceMismatch("g1, g2 and mu0 must live on the same state space");
  }
  if (study.metric.space() && !same_space(study.metric.space(), study.mu0.space())) {
    throw SpaceMismatch("study metric is defined on a different space");
  }
}

std::vector<std::size_t> dyadic_schedule(unsigned K) {
  if (K > 40) throw InvalidArgument("dyadic exponent too large");
  std::vector<std::size_t> out;
  for (unsigned k = 0; k <= K; ++k) out.push_back(std::size_t{1} << k);
  return out;
}

std::vector<std::size_t> linear_schedule(std::size_t N) {
  if (N == 0) throw InvalidArgument("linear schedule needs N >= 1");
  std::vector<std::size_t> out(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = i + 1;
  return out;
}

PositiveMeasure trotter_iterate(const Semigroup& g1, const Semigroup& g2, double t, std::size_t n,
                                const PositiveMeasure& mu, Order order) {
  if (!(t >= 0.0)) throw InvalidArgument("trotter_iterate: t must be >= 0");
  if (n == 0) throw InvalidArgument("trotter_iterate: n must be >= 1");
  const double h = t / static_cast<double>(n);
  const MarkovOperator p1 = g1.at_time(h);
  const MarkovOperator p2 = g2.at_time(h);
  const MarkovOperator& first = first_factor(order, p1, p2);
  const MarkovOperator& second = second_factor(order, p1, p2);
  PositiveMeasure cur = mu;
  for (std::size_t i = 0; i < n; ++i) cur = second.apply(first.apply(cur));
  return cur;
}

std::optional<PositiveMeasure> exact_limit(const Semigroup& g1, const Semigroup& g2, double t,
                                           const PositiveMeasure& mu) {
  using Kind = Semigroup::Kind;
  if (g1.kind() == Kind::matrix_exponential && g2.kind() == Kind::matrix_exponential) {
    const Semigroup sum = Semigroup::generator(g1.space(), g1.matrix() + g2.matrix());
    return sum.at_time(t).apply(mu);
  }
  const auto a = g1.linear_part();
  const auto b = g2.linear_part();
  if (a && b) {
    const Semigroup sum = Semigroup::linear_flow(g1.space(), *a + *b);
    return sum.at_time(t).apply(mu);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Modulus

double ModulusEstimate::envelope_at(double s) const {
  if (tGrid.empty()) throw InvalidArgument("empty modulus grid");
  if (s > max_time() * (1.0 + kGridRelTol) || s < min_time() * (1.0 - kGridRelTol)) {
    throw InvalidArgument("time " + format_double(s) + " outside modulus grid [" +
                          format_double(min_time()) + ", " + format_double(max_time()) + "]");
  }
  std::size_t pick = 0;
  for (std::size_t i = 0; i < tGrid.size(); ++i) {
    if (tGrid[i] >= s * (1.0 - kGridRelTol)) pick = i;
  }
  return monotoneEnvelope[pick];
}

ModulusEstimate make_modulus(std::vector<double> tGrid, std::vector<double> values) {
  if (tGrid.empty()) throw InvalidArgument("modulus grid is empty");
  if (tGrid.size() != values.size()) throw InvalidArgument("grid and values differ in length");
  for (std::size_t i = 0; i < tGrid.size(); ++i) {
    if (!(tGrid[i] > 0.0) || !std::isfinite(tGrid[i])) {
      throw InvalidArgument("modulus grid times must be positive");
    }
    if (i > 0 && !(tGrid[i] < tGrid[i - 1])) {
      throw InvalidArgument("modulus grid must be strictly decreasing");
    }
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw NumericalError("modulus values must be finite and >= 0");
    }
  }
  ModulusEstimate est;
  est.tGrid = std::move(tGrid);
  est.values = std::move(values);
  est.monotoneEnvelope.assign(est.values.size(), 0.0);
  double run = 0.0;
  for (std::size_t i = est.values.size(); i-- > 0;) {
    run = std::max(run, est.values[i]);
    est.monotoneEnvelope[i] = run;
  }
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < est.tGrid.size(); ++i) {
    const double hi = est.tGrid[i];
    const double lo = est.tGrid[i + 1];
    integral += 0.5 * (est.values[i] / hi + est.values[i + 1] / lo) * (hi - lo);
  }
  est.diniIntegral = integral;
  return est;
}

ModulusEstimate commutator_modulus(const Semigroup& g1, const Semigroup& g2,
                                   const PositiveMeasure& mu0, const std::vector<double>& tGrid,
                                   const Metric& metric, Execution exec) {
  for (double s : tGrid) {
    if (!(s > 0.0)) throw InvalidArgument("commutator_modulus: grid times must be positive");
  }
  std::vector<double> values = map_indices(tGrid.size(), exec, [&](std::size_t i) {
    return commutator_norm(g1, g2, mu0, tGrid[i], metric) / tGrid[i];
  });
  return make_modulus(tGrid, std::move(values));
}

std::vector<double> modulus_grid(double t, const std::vector<std::size_t>& divisors, unsigned depth) {
  if (!(t > 0.0)) throw InvalidArgument("modulus_grid: t must be positive");
  std::vector<double> times;
  for (unsigned p = 0; p <= depth; ++p) times.push_back(std::ldexp(t, -static_cast<int>(p)));
  for (std::size_t q : divisors) {
    if (q == 0) throw InvalidArgument("modulus_grid: divisor 0");
    times.push_back(t / static_cast<double>(q));
  }
  std::sort(times.begin(), times.end(), std::greater<>());
  std::vector<double> out;
  for (double s : times) {
    if (out.empty() || out.back() - s > 1e-14 * out.back()) out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Extended commutator constant

std::string FamilyMember::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "P2_" << a << " [P1 P2]^" << r << "(s=" << s << ") P1_" << b;
  return os.str();
}

PositiveMeasure apply_member(const Semigroup& g1, const Semigroup& g2, const FamilyMember& m,
                             const PositiveMeasure& mu) {
  PositiveMeasure cur = g1.at_time(m.b).apply(mu);
  if (m.r > 0) cur = trotter_iterate(g1, g2, m.s, m.r, cur, Order::g1_first);
  return g2.at_time(m.a).apply(cur);
}

std::vector<FamilyMember> sample_extended_family(double delta, std::size_t count, std::size_t r_max,
                                                 std::uint64_t seed) {
  if (!(delta >= 0.0)) throw InvalidArgument("family delta must be >= 0");
  if (r_max == 0) throw InvalidArgument("family r_max must be >= 1");
  std::vector<FamilyMember> out;
  out.push_back(FamilyMember{});
  std::mt19937_64 rng(splitmix64(seed));
  for (std::size_t i = 0; i < count; ++i) {
    FamilyMember m;
    m.a = uniform(rng, 0.0, delta);
    m.s = uniform(rng, 0.0, delta);
    m.r = uniform_count(rng, 1, r_max);
    m.b = uniform(rng, 0.0, delta);
    out.push_back(m);
  }
  return out;
}

CommutatorConstant extended_commutator_constant(const Semigroup& g1, const Semigroup& g2,
                                                const PositiveMeasure& mu0,
                                                const std::vector<double>& tGrid,
                                                const std::vector<FamilyMember>& family,
                                                const Metric& metric, Execution exec) {
  if (family.empty()) throw InvalidArgument("extended_commutator_constant: empty family");
  if (tGrid.empty()) throw InvalidArgument("extended_commutator_constant: empty grid");
  const std::vector<double> base = map_indices(tGrid.size(), exec, [&](std::size_t i) {
    return commutator_norm(g1, g2, mu0, tGrid[i], metric);
  });

  struct MemberResult {
    double worst = 1.0;
    std::vector<std::string> violations;
  };
  const auto results = map_indices(family.size(), exec, [&](std::size_t p) {
    MemberResult res;
    const PositiveMeasure nu = apply_member(g1, g2, family[p], mu0);
    for (std::size_t i = 0; i < tGrid.size(); ++i) {
      const double top = commutator_norm(g1, g2, nu, tGrid[i], metric);
      if (base[i] == 0.0) {
        if (top > 0.0) {
          res.violations.push_back("omega(t, mu0) = 0 but omega(t, P mu0) = " + format_double(top / tGrid[i]) +
                                   " at t=" + format_double(tGrid[i]) + " for " + family[p].describe());
        }
        continue;
      }
      res.worst = std::max(res.worst, top / base[i]);
    }
    return res;
  });

  CommutatorConstant out;
  out.value = 1.0;
  for (const auto& r : results) {
    out.value = std::max(out.value, r.worst);
    out.violations.insert(out.violations.end(), r.violations.begin(), r.violations.end());
  }
  out.sampleSize = family.size();
  double amax = 0.0, smax = 0.0, bmax = 0.0;
  std::size_t rmax = 0;
  for (const auto& m : family) {
    amax = std::max(amax, m.a);
    smax = std::max(smax, m.s);
    bmax = std::max(bmax, m.b);
    rmax = std::max(rmax, m.r);
  }
  std::ostringstream os;
  os << family.size() << " operators P2_a [P1_{s/r} P2_{s/r}]^r P1_b with a<=" << format_double(amax)
     << " s<=" << format_double(smax) << " b<=" << format_double(bmax) << " r<=" << rmax << ", "
     << tGrid.size() << " grid times";
  out.sampleDescription = os.str();
  return out;
}

// ---------------------------------------------------------------------------
// Bounds

std::vector<BoundComparison> refinement_bound_check(
    const Semigroup& g1, const Semigroup& g2, const PositiveMeasure& mu0, const TestFunction& f,
    double t, const std::vector<std::pair<std::size_t, std::size_t>>& pairs, double C,
    const ModulusEstimate& omega, Execution exec) {
  if (!(t >= 0.0)) throw InvalidArgument("refinement_bound_check: t must be >= 0");
  if (!(C >= 0.0)) throw InvalidArgument("refinement_bound_check: C must be >= 0");
  std::set<std::size_t> counts;
  for (const auto& [n, k] : pairs) {
    if (n == 0 || k == 0) throw InvalidArgument("refinement_bound_check: n and k must be >= 1");
    if (k > 1 && t > 0.0) {
      omega.envelope_at(t / static_cast<double>(n * k));
      counts.insert(n);
      counts.insert(n * k);
    }
  }
  const std::vector<std::size_t> list(counts.begin(), counts.end());
  const std::vector<double> paired = map_indices(list.size(), exec, [&](std::size_t i) {
    return pairing(trotter_iterate(g1, g2, t, list[i], mu0, Order::g1_first), f);
  });
  std::map<std::size_t, double> lookup;
  for (std::size_t i = 0; i < list.size(); ++i) lookup[list[i]] = paired[i];

  std::vector<BoundComparison> out;
  for (const auto& [n, k] : pairs) {
    BoundComparison bc;
    bc.n = n;
    bc.k = k;
    if (k > 1 && t > 0.0) {
      bc.lhs = std::abs(lookup.at(n) - lookup.at(n * k));
      bc.rhs = C * (static_cast<double>(k) - 1.0) / 2.0 * t *
               omega.envelope_at(t / static_cast<double>(n * k));
    }
    bc.ok = bc.lhs <= bc.rhs + kBoundSlack;
    out.push_back(bc);
  }
  return out;
}

std::vector<double> dyadic_sequence(const SplittingStudy& study, const TestFunction& f,
                                    Execution exec) {
  validate(study);
  for (std::size_t n : study.schedule) {
    if (!is_power_of_two(n)) {
      throw InvalidArgument("dyadic_sequence: schedule entry " + std::to_string(n) +
                            " is not a power of two");
    }
  }
  return map_indices(study.schedule.size(), exec, [&](std::size_t i) {
    return pairing(trotter_iterate(study.g1, study.g2, study.t, study.schedule[i], study.mu0,
                                   Order::g1_first),
                   f);
  });
}

std::vector<CauchyCheck> dyadic_cauchy_check(const std::vector<double>& r,
                                             const std::vector<unsigned>& exponents, double C,
                                             const ModulusEstimate& omega, double t) {
  if (r.size() != exponents.size()) throw InvalidArgument("dyadic_cauchy_check: size mismatch");
  std::vector<CauchyCheck> out;
  for (std::size_t p = 0; p < r.size(); ++p) {
    for (std::size_t q = 0; q < p; ++q) {
      CauchyCheck cc;
      cc.i = exponents[p];
      cc.j = exponents[q];
      if (cc.i <= cc.j) throw InvalidArgument("dyadic_cauchy_check: exponents must increase");
      cc.lhs = std::abs(r[p] - r[q]);
      double sum = 0.0;
      if (t > 0.0) {
        for (unsigned l = cc.j; l < cc.i; ++l) {
          sum += omega.envelope_at(std::ldexp(t, -static_cast<int>(l + 1)));
        }
      }
      cc.rhs = C * (t / 2.0) * sum;
      cc.ok = cc.lhs <= cc.rhs + kBoundSlack;
      out.push_back(cc);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Limits and rates

RateFit fit_loglog_rate(const std::vector<std::size_t>& schedule,
                        const std::vector<double>& distances) {
  if (schedule.size() != distances.size()) throw InvalidArgument("fit_loglog_rate: size mismatch");
  RateFit fit;
  const std::size_t total = schedule.size();
  const std::size_t window = (total + 1) / 2;
  const std::size_t start = total - window;
  std::vector<double> xs, ys;
  bool all_small = true;
  for (std::size_t i = start; i < total; ++i) {
    if (distances[i] > kSaturationLevel) all_small = false;
    if (distances[i] > 0.0) {
      xs.push_back(std::log(static_cast<double>(schedule[i])));
      ys.push_back(std::log(distances[i]));
    }
  }
  if (all_small || xs.size() < 2) {
    fit.saturated = true;
    return fit;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  fit.rate = -sxy / sxx;
  fit.points = xs.size();
  return fit;
}

LimitEstimate estimate_limit(const SplittingStudy& study, Execution exec) {
  validate(study);
  if (study.schedule.size() < 3) throw InvalidArgument("estimate_limit: schedule needs >= 3 entries");
  const auto iterates = map_indices(study.schedule.size(), exec, [&](std::size_t i) {
    return trotter_iterate(study.g1, study.g2, study.t, study.schedule[i], study.mu0, study.order);
  });
  const std::optional<PositiveMeasure> exact = exact_limit(study.g1, study.g2, study.t, study.mu0);
  const PositiveMeasure& reference = exact ? *exact : iterates.back();

  ConvergenceReport report;
  report.schedule = study.schedule;
  report.reference = exact ? "exact" : "finest_iterate";
  report.distances = map_indices(iterates.size(), exec, [&](std::size_t i) {
    return bl_distance(iterates[i], reference, study.metric);
  });
  for (double d : report.distances) {
    if (!std::isfinite(d) || d < 0.0) throw NumericalError("non-finite splitting distance");
  }
  std::vector<std::size_t> fit_n = study.schedule;
  std::vector<double> fit_d = report.distances;
  if (!exact) {
    fit_n.pop_back();
    fit_d.pop_back();
  }
  const RateFit fit = fit_loglog_rate(fit_n, fit_d);
  report.fittedRate = fit.rate;
  report.saturated = fit.saturated;
  report.fitPoints = fit.points;
  return LimitEstimate{iterates.back(), std::move(report)};
}

double swap_order_limit_distance(const SplittingStudy& study) {
  validate(study);
  const std::size_t n = study.schedule.back();
  const PositiveMeasure a = trotter_iterate(study.g1, study.g2, study.t, n, study.mu0, Order::g1_first);
  const PositiveMeasure b = trotter_iterate(study.g1, study.g2, study.t, n, study.mu0, Order::g2_first);
  return bl_distance(a, b, study.metric);
}

double self_convergence_distance(const SplittingStudy& study, std::size_t n) {
  validate(study);
  if (n < 2) throw InvalidArgument("self_convergence_distance: n must be >= 2");
  const PositiveMeasure a = trotter_iterate(study.g1, study.g2, study.t, n, study.mu0, study.order);
  const PositiveMeasure b =
      trotter_iterate(study.g1, study.g2, study.t, n / 2, study.mu0, study.order);
  return bl_distance(a, b, study.metric);
}

DiniResult dini_integral(const ModulusEstimate& omega, double a, double t) {
  if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("dini_integral: a must lie in (0, 1)");
  if (!(t > 0.0)) throw InvalidArgument("dini_integral: t must be positive");
  if (omega.tGrid.empty() || t > omega.max_time() * (1.0 + kGridRelTol) ||
      t < omega.min_time() * (1.0 - kGridRelTol)) {
    throw InvalidArgument("dini_integral: t outside the modulus grid");
  }
  DiniResult res;
  unsigned depth = 0;
  double node = t;
  while (depth < 4096 && node * a >= omega.min_time() * (1.0 - kGridRelTol)) {
    node *= a;
    ++depth;
  }
  res.depth = depth;
  const double bottom = t * std::pow(a, static_cast<double>(depth));

  std::vector<double> nodes;
  double s = t;
  nodes.push_back(t);
  for (unsigned n = 1; n <= depth; ++n) {
    s *= a;
    nodes.push_back(s);
    res.tailSum += omega.envelope_at(s);
  }
  for (double g : omega.tGrid) {
    if (g < t * (1.0 - kGridRelTol) && g > bottom * (1.0 + kGridRelTol)) nodes.push_back(g);
  }
  std::sort(nodes.begin(), nodes.end(), std::greater<>());
  std::vector<double> uniq;
  for (double v : nodes) {
    if (uniq.empty() || uniq.back() - v > kGridRelTol * uniq.back()) uniq.push_back(v);
  }
  for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
    const double hi = uniq[i];
    const double lo = uniq[i + 1];
    res.integral += 0.5 * (omega.envelope_at(hi) / hi + omega.envelope_at(lo) / lo) * (hi - lo);
  }
  res.tailBounded = res.tailSum <= res.integral / (1.0 - a) + kBoundSlack;
  return res;
}

// ---------------------------------------------------------------------------
// Envelope family

std::string EnvelopeTruncation::describe() const {
  std::ostringstream os;
  os << "U2_s U1_s' [U2_{tau/n} U1_{tau/n}]^n f, n<=" << nMax << ", s,s',tau on " << grid
     << " points of [0, " << format_double(delta) << "]";
  return os.str();
}

std::vector<LipschitzWitness> truncated_envelope_family(const Semigroup& g1, const Semigroup& g2,
                                                        const LipschitzWitness& f,
                                                        const EnvelopeTruncation& trunc) {
  if (g1.space()->kind() != StateSpace::Kind::finite) {
    throw InvalidArgument("truncated_envelope_family: finite spaces only");
  }
  if (trunc.grid == 0 || trunc.nMax == 0 || !(trunc.delta >= 0.0)) {
    throw InvalidArgument("truncated_envelope_family: bad truncation parameters");
  }
  const SpacePtr& space = g1.space();
  for (std::size_t i = 0; i < space->size(); ++i) f.at(*space, Point::state(i));

  std::vector<double> times;
  if (trunc.grid == 1) {
    times.push_back(0.0);
  } else {
    for (std::size_t i = 0; i < trunc.grid; ++i) {
      times.push_back(trunc.delta * static_cast<double>(i) / static_cast<double>(trunc.grid - 1));
    }
  }
  std::map<std::pair<int, double>, MarkovOperator> cache;
  auto op = [&](int which, double s) -> const MarkovOperator& {
    auto key = std::make_pair(which, s);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, (which == 1 ? g1 : g2).at_time(s)).first;
    }
    return it->second;
  };

  std::vector<LipschitzWitness> out;
  for (std::size_t n = 1; n <= trunc.nMax; ++n) {
    for (double tau : times) {
      LipschitzWitness h = f;
      const double step = tau / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) h = dual_apply(op(2, step), dual_apply(op(1, step), h));
      for (double sp : times) {
        const LipschitzWitness h1 = dual_apply(op(1, sp), h);
        for (double s : times) out.push_back(dual_apply(op(2, s), h1));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full study

StudyResult run_splitting_study(const SplittingStudy& study, const std::vector<TestFunction>& witnesses,
                                const StudyConfig& config, const MetricForWitness& metric_for) {
  validate(study);
  if (!(study.t > 0.0)) throw InvalidArgument("a splitting study needs t > 0");
  const Execution exec = config.exec;

  StudyResult result{estimate_limit(study, exec), {}, 0.0, 0.0, false};
  ConvergenceReport& report = result.estimate.report;

  result.dyadic = std::all_of(study.schedule.begin(), study.schedule.end(), is_power_of_two);

  std::vector<std::size_t> divisors;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t n : config.refinementN) {
    for (std::size_t k : config.refinementK) {
      pairs.emplace_back(n, k);
      divisors.push_back(n * k);
    }
  }
  for (std::size_t n : study.schedule) {
    for (std::size_t k : config.refinementK) divisors.push_back(n * k);
  }
  unsigned depth = config.gridDepth;
  depth = std::max(depth, log2_exact(study.schedule.back()) + 1);
  const std::vector<double> grid = modulus_grid(study.t, divisors, depth);
  const std::vector<FamilyMember> family =
      sample_extended_family(study.t, config.familySample, config.familyRMax, config.seed);

  std::vector<unsigned> exponents;
  if (result.dyadic) {
    for (std::size_t n : study.schedule) exponents.push_back(log2_exact(n));
  }

  std::optional<std::pair<ModulusEstimate, CommutatorConstant>> shared;
  for (const TestFunction& f : witnesses) {
    WitnessOutcome w;
    w.label = f.label();
    const Metric metric = metric_for ? metric_for(f) : study.metric;
    w.metric = metric.label();
    if (metric_for || !shared) {
      ModulusEstimate om = commutator_modulus(study.g1, study.g2, study.mu0, grid, metric, exec);
      CommutatorConstant cc =
          extended_commutator_constant(study.g1, study.g2, study.mu0, grid, family, metric, exec);
      if (!metric_for) shared.emplace(om, cc);
      w.modulus = std::move(om);
      w.constant = std::move(cc);
    } else {
      w.modulus = shared->first;
      w.constant = shared->second;
    }
    w.bounds = refinement_bound_check(study.g1, study.g2, study.mu0, f, study.t, pairs,
                                      w.constant.value, w.modulus, exec);
    for (std::size_t n : study.schedule) {
      std::vector<std::pair<std::size_t, std::size_t>> row;
      for (std::size_t k : config.refinementK) row.emplace_back(n, k);
      w.perEntry.push_back(refinement_bound_check(study.g1, study.g2, study.mu0, f, study.t, row,
                                                  w.constant.value, w.modulus, exec));
    }
    if (result.dyadic) {
      w.dyadic = dyadic_sequence(study, f, exec);
      w.cauchy = dyadic_cauchy_check(w.dyadic, exponents, w.constant.value, w.modulus, study.t);
    }
    w.dini = dini_integral(w.modulus, config.diniRatio, study.t);

    for (const auto& b : w.bounds) {
      if (!b.ok) {
        report.violations.push_back("refinement bound n=" + std::to_string(b.n) +
                                    " k=" + std::to_string(b.k) + " witness=" + w.label +
                                    ": lhs " + format_double(b.lhs) + " > rhs " + format_double(b.rhs));
      }
    }
    for (const auto& c : w.cauchy) {
      if (!c.ok) {
        report.violations.push_back("dyadic Cauchy i=" + std::to_string(c.i) +
                                    " j=" + std::to_string(c.j) + " witness=" + w.label + ": lhs " +
                                    format_double(c.lhs) + " > rhs " + format_double(c.rhs));
      }
    }
    for (const auto& v : w.constant.violations) {
      report.violations.push_back("commutator constant witness=" + w.label + ": " + v);
    }
    if (!w.dini.tailBounded) {
      report.violations.push_back("dini tail sum exceeds integral/(1-a) for witness=" + w.label);
    }
    result.witnesses.push_back(std::move(w));
  }

  if (!result.witnesses.empty()) {
    const WitnessOutcome& first = result.witnesses.front();
    report.boundComparisons = first.bounds;
    for (std::size_t i = 0; i + 1 < first.dyadic.size(); ++i) {
      report.cauchyDiffs.push_back(std::abs(first.dyadic[i + 1] - first.dyadic[i]));
    }
  }
  result.swapDistance = swap_order_limit_distance(study);
  if (study.schedule.back() >= 2) {
    result.selfConvergence = self_convergence_distance(study, study.schedule.back());
  }
  return result;
}

}  // namespace trotterkit
