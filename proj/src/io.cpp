#include "trotterkit/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "trotterkit/errors.hpp"

namespace trotterkit {

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(where + ": missing field \"" + key + "\"");
  }
  return j.at(key);
}

double real_of(const json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << contents;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw InputError(what + ": rows must be nonempty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InputError(what + ": row " + std::to_string(r) + " has the wrong length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = real_of(row[static_cast<std::size_t>(c)],
                        what + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

SpacePtr space_from_json(const json& j) {
  const std::string kind = require(j, "kind", "space").get<std::string>();
  try {
    if (kind == "finite") return StateSpace::finite(matrix_from_json(require(j, "dist", "space"), "space.dist"));
    if (kind == "euclidean") {
      const json& d = require(j, "dim", "space");
      if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) {
        throw InputError("space.dim: expected a positive integer");
      }
      return StateSpace::euclidean(d.get<std::size_t>());
    }
  } catch (const InvalidArgument& e) {
    throw InputError(std::string("space: ") + e.what());
  }
  throw InputError("space.kind: unknown kind \"" + kind + "\"");
}

json space_to_json(const StateSpace& space) {
  if (space.is_finite()) return json{{"kind", "finite"}, {"dist", matrix_to_json(space.dist())}};
  return json{{"kind", "euclidean"}, {"dim", space.dim()}};
}

Point point_from_json(const json& j, const StateSpace& space) {
  if (space.is_finite()) {
    if (!j.is_number_unsigned()) throw InputError("point: expected a state index");
    const auto i = j.get<std::size_t>();
    if (i >= space.size()) throw InputError("point: state " + std::to_string(i) + " out of range");
    return Point::state(i);
  }
  if (!j.is_array() || j.size() != space.dim()) {
    throw InputError("point: expected " + std::to_string(space.dim()) + " coordinates");
  }
  Coords x;
  for (const auto& v : j) x.push_back(real_of(v, "point"));
  return Point::at(std::move(x));
}

json point_to_json(const Point& p, const StateSpace& space) {
  if (space.is_finite()) return p.index;
  return p.coords;
}

SignedMeasure signed_measure_from_json(const json& j, const SpacePtr& space) {
  const json& atoms = require(j, "atoms", "measure");
  if (!atoms.is_array()) throw InputError("measure.atoms: expected an array");
  std::vector<Atom> list;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string where = "measure.atoms[" + std::to_string(i) + "]";
    const double w = real_of(require(atoms[i], "weight", where), where + ".weight");
    if (!std::isfinite(w)) throw InputError(where + ".weight: not finite");
    list.push_back(Atom{point_from_json(require(atoms[i], "point", where), *space), w});
  }
  return SignedMeasure::from_atoms(space, std::move(list));
}

PositiveMeasure positive_measure_from_json(const json& j, const SpacePtr& space) {
  const SignedMeasure mu = signed_measure_from_json(j, space);
  if (!mu.negative().empty()) throw InputError("measure: negative weight in a positive measure");
  return mu.positive();
}

json measure_to_json(const SignedMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.signed_atoms()) {
    atoms.push_back(json{{"point", point_to_json(a.point, *mu.space())}, {"weight", a.weight}});
  }
  return json{{"atoms", atoms}};
}

json measure_to_json(const PositiveMeasure& mu) { return measure_to_json(SignedMeasure(mu)); }

LipschitzWitness witness_from_json(const json& j, const StateSpace& space) {
  LipschitzWitness w;
  const json& pts = require(j, "points", "witness");
  const json& vals = require(j, "values", "witness");
  if (!pts.is_array() || !vals.is_array() || pts.size() != vals.size()) {
    throw InputError("witness: points and values must be arrays of equal length");
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    w.points.push_back(point_from_json(pts[i], space));
    w.values.push_back(real_of(vals[i], "witness.values"));
  }
  w.supBound = real_of(require(j, "supBound", "witness"), "witness.supBound");
  w.lipBound = real_of(require(j, "lipBound", "witness"), "witness.lipBound");
  return w;
}

json witness_to_json(const LipschitzWitness& w, const StateSpace& space) {
  json pts = json::array();
  for (const auto& p : w.points) pts.push_back(point_to_json(p, space));
  return json{{"points", pts}, {"values", w.values}, {"supBound", w.supBound}, {"lipBound", w.lipBound}};
}

Semigroup semigroup_from_json(const json& j, const SpacePtr& space) {
  const std::string kind = require(j, "kind", "semigroup").get<std::string>();
  try {
    Semigroup g = [&] {
      if (kind == "matrix_exponential") {
        return Semigroup::generator(space, matrix_from_json(require(j, "Q", "semigroup"), "semigroup.Q"));
      }
      if (kind == "linear_flow_lift") {
        return Semigroup::linear_flow(space, matrix_from_json(require(j, "A", "semigroup"), "semigroup.A"));
      }
      if (kind == "map_flow") {
        const std::string map = require(j, "map", "semigroup").get<std::string>();
        const json params = j.value("params", json::object());
        if (map == "translation") {
          Coords v;
          for (const auto& x : require(params, "velocity", "semigroup.params")) {
            v.push_back(real_of(x, "semigroup.params.velocity"));
          }
          return Semigroup::translation(space, v);
        }
        if (map == "contraction") {
          return Semigroup::contraction(space, params.contains("rate") ? real_of(params["rate"], "rate") : 1.0);
        }
        if (map == "rotation") {
          return Semigroup::rotation(space, real_of(require(params, "omega", "semigroup.params"), "omega"));
        }
        throw InputError("semigroup.map: unknown map \"" + map + "\"");
      }
      throw InputError("semigroup.kind: unknown kind \"" + kind + "\"");
    }();
    if (j.contains("auxiliaryNormWeight")) {
      const std::string w = j["auxiliaryNormWeight"].get<std::string>();
      if (w == "one") {
        g = g.with_norm_weight(NormWeight::one);
      } else if (w == "euclidean_norm") {
        g = g.with_norm_weight(NormWeight::euclidean_norm);
      } else {
        throw InputError("semigroup.auxiliaryNormWeight: unknown weight \"" + w + "\"");
      }
    }
    return g;
  } catch (const InvalidArgument& e) {
    throw InputError(std::string("semigroup: ") + e.what());
  }
}

json semigroup_to_json(const Semigroup& g) {
  json out;
  switch (g.kind()) {
    case Semigroup::Kind::matrix_exponential:
      out = json{{"kind", "matrix_exponential"}, {"Q", matrix_to_json(g.matrix())}};
      break;
    case Semigroup::Kind::linear_flow_lift:
      out = json{{"kind", "linear_flow_lift"}, {"A", matrix_to_json(g.matrix())}};
      break;
    case Semigroup::Kind::map_flow:
      switch (g.flow()) {
        case Semigroup::Flow::translation:
          out = json{{"kind", "map_flow"}, {"map", "translation"}, {"params", {{"velocity", g.velocity()}}}};
          break;
        case Semigroup::Flow::contraction:
          out = json{{"kind", "map_flow"}, {"map", "contraction"}, {"params", {{"rate", g.rate()}}}};
          break;
        default:
          out = json{{"kind", "map_flow"}, {"map", "rotation"}, {"params", {{"omega", g.rate()}}}};
          break;
      }
      break;
  }
  if (g.norm_weight() == NormWeight::one) out["auxiliaryNormWeight"] = "one";
  if (g.norm_weight() == NormWeight::euclidean_norm) out["auxiliaryNormWeight"] = "euclidean_norm";
  return out;
}

}  // namespace trotterkit
