#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trotterkit/io.hpp"
#include "trotterkit/splitting.hpp"

namespace trotterkit {

inline constexpr int kSchemaVersion = 1;

/// Diagnostic probe parameters; every field has a default.
struct DiagnosticsConfig {
  std::vector<double> perturbSizes = {1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> equicontinuityTargets = {0.2, 0.1, 0.05, 0.02, 0.01};
  std::vector<double> hGrid = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<double> radiusGrid = {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 4.0, 8.0};
  std::vector<std::size_t> familyCounts = {1, 2, 4, 8, 16, 32, 64};
  std::optional<std::size_t> nFinest;
  std::optional<double> s;
};

struct Scenario {
  std::string name;
  std::string hash;  // FNV-1a of the file bytes
  SpacePtr space;
  Semigroup g1;
  Semigroup g2;
  PositiveMeasure mu0;
  double t = 1.0;
  std::vector<std::size_t> schedule;
  std::string scheduleLabel;
  Order order = Order::g1_first;
  /// Envelope truncation when the metric is d_E(f); nullopt for the base metric.
  std::optional<EnvelopeTruncation> envelope;
  std::vector<TestFunction> witnesses;
  StudyConfig config;
  DiagnosticsConfig diagnostics;
  json source;

  SplittingStudy study() const;
  /// Per-witness metric: the base metric, or d_E(f) built from the
  /// truncated envelope family of f.
  MetricForWitness metric_for() const;
};

/// Command-line overrides applied on top of the scenario file.
struct ScenarioOverrides {
  std::optional<double> t;
  std::optional<unsigned> dyadic;
  std::optional<std::size_t> linear;
  std::optional<Order> order;
  std::optional<std::string> metric;  // "base" | "envelope"
  std::optional<std::uint64_t> seed;
};

/// Throws InputError with a line:column anchor for syntax errors and a field
/// path for validation errors.
Scenario parse_scenario(const std::string& text, const std::string& origin,
                        const ScenarioOverrides& overrides = {});
Scenario load_scenario(const std::string& path, const ScenarioOverrides& overrides = {});

/// Witness panel entries:
///   {"kind": "random_lipschitz", "count": c, "sup": M, "lip": L, "seed": s}
///   {"kind": "coordinate", "axis": i, "scale": a, "cap": M}            (Euclidean)
///   {"kind": "indicator_smoothed", "center": x, "radius": r, "width": w, "height": h}
///   {"kind": "explicit", "values": [...]}                               (finite)
std::vector<TestFunction> witnesses_from_json(const json& j, const SpacePtr& space);

}  // namespace trotterkit
