#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "trotterkit/bl_metric.hpp"
#include "trotterkit/semigroup.hpp"

namespace trotterkit {

using json = nlohmann::json;

inline constexpr const char* kToolName = "trotterkit";
inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit hash, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// %.17g.
std::string format_real(double v);

std::string read_file(const std::string& path);
/// Writes with LF line endings; creates parent directories.
void write_file(const std::string& path, const std::string& contents);

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what);
json matrix_to_json(const Eigen::MatrixXd& m);

/// {"kind": "finite", "dist": [[...]]} | {"kind": "euclidean", "dim": d}.
SpacePtr space_from_json(const json& j);
json space_to_json(const StateSpace& space);

/// Index on finite spaces, coordinate array on Euclidean ones.
Point point_from_json(const json& j, const StateSpace& space);
json point_to_json(const Point& p, const StateSpace& space);

/// {"atoms": [{"point": ..., "weight": w}, ...]}.
SignedMeasure signed_measure_from_json(const json& j, const SpacePtr& space);
PositiveMeasure positive_measure_from_json(const json& j, const SpacePtr& space);
json measure_to_json(const SignedMeasure& mu);
json measure_to_json(const PositiveMeasure& mu);

/// {"points": [...], "values": [...], "supBound": M, "lipBound": L}.
LipschitzWitness witness_from_json(const json& j, const StateSpace& space);
json witness_to_json(const LipschitzWitness& w, const StateSpace& space);

/// {"kind": "matrix_exponential", "Q": ...} | {"kind": "linear_flow_lift", "A": ...} |
/// {"kind": "map_flow", "map": "translation"|"contraction"|"rotation", "params": {...}}
/// with optional "auxiliaryNormWeight": "one"|"euclidean_norm".
Semigroup semigroup_from_json(const json& j, const SpacePtr& space);
json semigroup_to_json(const Semigroup& g);

}  // namespace trotterkit
