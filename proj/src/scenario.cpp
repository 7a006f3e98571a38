#include "trotterkit/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "trotterkit/errors.hpp"
#include "trotterkit/random.hpp"

namespace trotterkit {

namespace {

std::string line_anchor(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

double lipschitz_of(const std::vector<double>& values, const StateSpace& space) {
  double lip = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      lip = std::max(lip, std::abs(values[i] - values[j]) /
                              space.distance(Point::state(i), Point::state(j)));
    }
  }
  return lip;
}

TestFunction finite_witness(const SpacePtr& space, std::vector<double> values, std::string label) {
  LipschitzWitness w;
  for (std::size_t i = 0; i < values.size(); ++i) w.points.push_back(Point::state(i));
  w.lipBound = lipschitz_of(values, *space);
  for (double v : values) w.supBound = std::max(w.supBound, std::abs(v));
  w.values = std::move(values);
  return TestFunction::from_witness(space, std::move(w), std::move(label));
}

double num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw InputError(std::string("witness.") + key + ": expected a number");
  return j[key].get<double>();
}

std::vector<double> real_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw InputError(what + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::size_t> count_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + ": expected an array");
  std::vector<std::size_t> out;
  for (const auto& v : j) {
    if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) {
      throw InputError(what + ": expected positive integers");
    }
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

Order order_from(const std::string& s) {
  if (s == "12") return Order::g1_first;
  if (s == "21") return Order::g2_first;
  throw InputError("study.order: expected \"12\" or \"21\"");
}

EnvelopeTruncation truncation_from(const json& j, double t) {
  EnvelopeTruncation tr;
  tr.delta = t;
  if (j.is_object()) {
    tr.delta = j.value("delta", t);
    tr.nMax = j.value("nMax", tr.nMax);
    tr.grid = j.value("grid", tr.grid);
  }
  return tr;
}

}  // namespace

std::vector<TestFunction> witnesses_from_json(const json& j, const SpacePtr& space) {
  if (!j.is_array()) throw InputError("witnesses: expected an array");
  std::vector<TestFunction> out;
  for (std::size_t idx = 0; idx < j.size(); ++idx) {
    const json& w = j[idx];
    const std::string where = "witnesses[" + std::to_string(idx) + "]";
    if (!w.is_object() || !w.contains("kind") || !w["kind"].is_string()) {
      throw InputError(where + ": missing \"kind\"");
    }
    const std::string kind = w["kind"].get<std::string>();
    if (kind == "random_lipschitz") {
      const std::size_t count = w.value("count", std::size_t{1});
      const double sup = num(w, "sup", 0.5);
      const double lip = num(w, "lip", sup);
      const std::uint64_t seed = w.value("seed", std::uint64_t{1});
      for (std::size_t c = 0; c < count; ++c) {
        std::mt19937_64 rng = trial_rng(seed, c);
        const std::string label = "random_lipschitz#" + std::to_string(c);
        if (space->is_finite()) {
          std::vector<double> values(space->size());
          for (auto& v : values) v = uniform(rng, -sup, sup);
          const double ratio = lipschitz_of(values, *space);
          if (ratio > lip) {
            for (auto& v : values) v *= lip / ratio;
          }
          out.push_back(finite_witness(space, std::move(values), label));
        } else {
          Coords dir(space->dim());
          double norm = 0.0;
          for (auto& v : dir) {
            v = uniform(rng, -1.0, 1.0);
            norm += v * v;
          }
          norm = std::sqrt(norm);
          if (norm == 0.0) norm = 1.0;
          const double freq = sup > 0.0 ? lip / sup : 0.0;
          for (auto& v : dir) v *= freq / norm;
          const double phase = uniform(rng, 0.0, 6.283185307179586);
          out.emplace_back(
              [dir, phase, sup](const Point& x) {
                double s = phase;
                for (std::size_t d = 0; d < dir.size(); ++d) s += dir[d] * x.coords[d];
                return sup * std::sin(s);
              },
              sup, sup * freq, label);
        }
      }
    } else if (kind == "coordinate") {
      if (space->is_finite()) throw InputError(where + ": coordinate witnesses need a Euclidean space");
      const std::size_t axis = w.value("axis", std::size_t{0});
      if (axis >= space->dim()) throw InputError(where + ".axis: out of range");
      const double scale = num(w, "scale", 1.0);
      const double cap = num(w, "cap", 1.0);
      out.emplace_back(
          [axis, scale, cap](const Point& x) { return std::clamp(scale * x.coords[axis], -cap, cap); },
          cap, std::abs(scale), "coordinate#" + std::to_string(axis));
    } else if (kind == "indicator_smoothed") {
      if (!w.contains("center")) throw InputError(where + ": missing \"center\"");
      const Point c = point_from_json(w["center"], *space);
      const double radius = num(w, "radius", 0.0);
      const double width = num(w, "width", 1.0);
      const double height = num(w, "height", 0.5);
      if (!(width > 0.0)) throw InputError(where + ".width: must be positive");
      const SpacePtr sp = space;
      out.emplace_back(
          [sp, c, radius, width, height](const Point& x) {
            const double d = sp->distance(x, c);
            return height * std::clamp(1.0 - (d - radius) / width, 0.0, 1.0);
          },
          std::abs(height), std::abs(height) / width, "indicator_smoothed#" + std::to_string(idx));
    } else if (kind == "explicit") {
      if (!space->is_finite()) throw InputError(where + ": explicit witnesses need a finite space");
      std::vector<double> values = real_list(w.value("values", json()), where + ".values");
      if (values.size() != space->size()) throw InputError(where + ".values: one value per state");
      out.push_back(finite_witness(space, std::move(values), "explicit#" + std::to_string(idx)));
    } else {
      throw InputError(where + ".kind: unknown kind \"" + kind + "\"");
    }
  }
  return out;
}

SplittingStudy Scenario::study() const {
  return SplittingStudy{g1, g2, mu0, t, schedule, order, Metric::base(space)};
}

MetricForWitness Scenario::metric_for() const {
  if (!envelope) return {};
  const Semigroup a = g1;
  const Semigroup b = g2;
  const SpacePtr sp = space;
  const EnvelopeTruncation tr = *envelope;
  return [a, b, sp, tr](const TestFunction& f) {
    std::vector<Point> states;
    for (std::size_t i = 0; i < sp->size(); ++i) states.push_back(Point::state(i));
    const LipschitzWitness w = f.materialize(states);
    return Metric::envelope(build_envelope_metric(sp, truncated_envelope_family(a, b, w, tr), tr.describe()));
  };
}

Scenario parse_scenario(const std::string& text, const std::string& origin,
                        const ScenarioOverrides& ov) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ":" + line_anchor(text, e.byte) + ": malformed JSON");
  }
  try {
    if (!root.is_object()) throw InputError("top level must be an object");
    if (!root.contains("schemaVersion") || root["schemaVersion"] != kSchemaVersion) {
      throw InputError("schemaVersion: expected 1");
    }
    for (const char* key : {"space", "g1", "g2", "mu0", "study"}) {
      if (!root.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
    }
    const SpacePtr space = space_from_json(root["space"]);
    Semigroup g1 = semigroup_from_json(root["g1"], space);
    Semigroup g2 = semigroup_from_json(root["g2"], space);
    PositiveMeasure mu0 = positive_measure_from_json(root["mu0"], space);
    const json& st = root["study"];
    if (!st.is_object()) throw InputError("study: expected an object");

    double t = st.value("t", 1.0);
    if (ov.t) t = *ov.t;
    if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("study.t: must be finite and >= 0");

    std::vector<std::size_t> schedule;
    std::string label;
    const json sched = st.value("schedule", json{{"dyadic", 10}});
    if (ov.dyadic) {
      schedule = dyadic_schedule(*ov.dyadic);
      label = "dyadic " + std::to_string(*ov.dyadic);
    } else if (ov.linear) {
      schedule = linear_schedule(*ov.linear);
      label = "linear " + std::to_string(*ov.linear);
    } else if (sched.contains("dyadic")) {
      const unsigned K = sched["dyadic"].get<unsigned>();
      schedule = dyadic_schedule(K);
      label = "dyadic " + std::to_string(K);
    } else if (sched.contains("linear")) {
      const std::size_t N = sched["linear"].get<std::size_t>();
      schedule = linear_schedule(N);
      label = "linear " + std::to_string(N);
    } else {
      throw InputError("study.schedule: expected {\"dyadic\": K} or {\"linear\": N}");
    }

    Order order = order_from(st.value("order", std::string("12")));
    if (ov.order) order = *ov.order;

    std::optional<EnvelopeTruncation> envelope;
    const json metric = st.value("metric", json("base"));
    const std::string mode =
        ov.metric ? *ov.metric : (metric.is_string() ? metric.get<std::string>() : std::string("envelope"));
    if (mode == "envelope") {
      envelope = truncation_from(metric.is_object() ? metric.value("envelope", json()) : json(), t);
      if (!space->is_finite()) throw InputError("study.metric: the envelope metric needs a finite space");
    } else if (mode != "base") {
      throw InputError("study.metric: expected \"base\" or an envelope object");
    }

    StudyConfig config;
    if (st.contains("refinementN")) config.refinementN = count_list(st["refinementN"], "study.refinementN");
    if (st.contains("refinementK")) config.refinementK = count_list(st["refinementK"], "study.refinementK");
    config.familySample = st.value("familySample", config.familySample);
    config.familyRMax = st.value("familyRMax", config.familyRMax);
    config.seed = st.value("seed", config.seed);
    config.diniRatio = st.value("diniRatio", config.diniRatio);
    config.gridDepth = st.value("gridDepth", config.gridDepth);
    if (ov.seed) config.seed = *ov.seed;

    DiagnosticsConfig diag;
    if (root.contains("diagnostics")) {
      const json& d = root["diagnostics"];
      if (d.contains("perturbSizes")) diag.perturbSizes = real_list(d["perturbSizes"], "diagnostics.perturbSizes");
      if (d.contains("equicontinuityTargets")) {
        diag.equicontinuityTargets = real_list(d["equicontinuityTargets"], "diagnostics.equicontinuityTargets");
      }
      if (d.contains("hGrid")) diag.hGrid = real_list(d["hGrid"], "diagnostics.hGrid");
      if (d.contains("radiusGrid")) diag.radiusGrid = real_list(d["radiusGrid"], "diagnostics.radiusGrid");
      if (d.contains("familyCounts")) diag.familyCounts = count_list(d["familyCounts"], "diagnostics.familyCounts");
      if (d.contains("nFinest")) diag.nFinest = d["nFinest"].get<std::size_t>();
      if (d.contains("s")) diag.s = d["s"].get<double>();
    }

    std::vector<TestFunction> witnesses =
        root.contains("witnesses") ? witnesses_from_json(root["witnesses"], space) : std::vector<TestFunction>{};

    Scenario sc{root.value("name", std::string("unnamed")),
                fnv1a_hex(text),
                space,
                std::move(g1),
                std::move(g2),
                std::move(mu0),
                t,
                std::move(schedule),
                std::move(label),
                order,
                envelope,
                std::move(witnesses),
                config,
                diag,
                root};
    validate(sc.study());
    return sc;
  } catch (const InputError& e) {
    throw InputError(origin + ": " + e.what());
  } catch (const Error& e) {
    throw InputError(origin + ": " + e.what());
  } catch (const json::exception& e) {
    throw InputError(origin + ": " + e.what());
  }
}

Scenario load_scenario(const std::string& path, const ScenarioOverrides& overrides) {
  return parse_scenario(read_file(path), path, overrides);
}

}  // namespace trotterkit
