#include "trotterkit/cli.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include "trotterkit/diagnostics.hpp"
#include "trotterkit/errors.hpp"

namespace trotterkit {

namespace {

std::string header_line(const std::string& scenario, const std::string& hash) {
  return std::string("# ") + kToolName + " " + kToolVersion + " scenario=" + scenario + " hash=" + hash + "\n";
}

json provenance(const std::string& scenario, const std::string& hash) {
  return json{{"tool", kToolName}, {"version", kToolVersion}, {"scenario", scenario}, {"scenarioHash", hash}};
}

std::string join(const std::filesystem::path& dir, const std::string& name) {
  return (dir / name).string();
}

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv_real(double v) { return std::isfinite(v) ? format_real(v) : std::string(); }

// Runs `body`, mapping input problems to exit code 1.
template <class Fn>
int guarded(std::ostream& log, Fn&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    log << "error: " << e.what() << "\n";
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
  } catch (const json::exception& e) {
    log << "error: " << e.what() << "\n";
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
  }
  return kExitInputError;
}

std::string identities_target(const std::string& out_path) {
  const std::filesystem::path p(out_path);
  if (p.extension() == ".json") return p.string();
  return (p / "identities.json").string();
}

}  // namespace

// ---------------------------------------------------------------------------
// study

int run_study(const std::string& scenario_path, const std::string& out_dir,
              const ScenarioOverrides& overrides, std::ostream& log) {
  return guarded(log, [&] {
    const Scenario sc = load_scenario(scenario_path, overrides);
    const StudyResult res = run_splitting_study(sc.study(), sc.witnesses, sc.config, sc.metric_for());
    const ConvergenceReport& rep = res.estimate.report;
    const std::filesystem::path dir(out_dir);
    const std::string head = header_line(sc.name, sc.hash);

    std::ostringstream report;
    report << head << "n,distance";
    for (std::size_t k : sc.config.refinementK) report << ",lhs_k" << k << ",rhs_k" << k;
    report << ",rate\n";
    for (std::size_t p = 0; p < rep.schedule.size(); ++p) {
      report << rep.schedule[p] << "," << format_real(rep.distances[p]);
      for (std::size_t q = 0; q < sc.config.refinementK.size(); ++q) {
        if (res.witnesses.empty()) {
          report << ",,";
        } else {
          const BoundComparison& b = res.witnesses.front().perEntry[p][q];
          report << "," << format_real(b.lhs) << "," << format_real(b.rhs);
        }
      }
      double rate = std::nan("");
      if (p > 0 && rep.distances[p] > 0.0 && rep.distances[p - 1] > 0.0) {
        rate = -std::log(rep.distances[p] / rep.distances[p - 1]) /
               std::log(static_cast<double>(rep.schedule[p]) / static_cast<double>(rep.schedule[p - 1]));
      }
      report << "," << csv_real(rate) << "\n";
    }
    write_file(join(dir, "report.csv"), report.str());

    std::ostringstream modulus;
    modulus << head << "witness,metric,t,omega,envelope\n";
    for (const auto& w : res.witnesses) {
      for (std::size_t i = 0; i < w.modulus.tGrid.size(); ++i) {
        modulus << w.label << "," << w.metric << "," << format_real(w.modulus.tGrid[i]) << ","
                << format_real(w.modulus.values[i]) << "," << format_real(w.modulus.monotoneEnvelope[i])
                << "\n";
      }
    }
    write_file(join(dir, "modulus.csv"), modulus.str());

    std::ostringstream bounds;
    bounds << head << "check,witness,a,b,lhs,rhs,ok\n";
    bool bound_failure = false;
    for (const auto& w : res.witnesses) {
      for (const auto& b : w.bounds) {
        bounds << "refinement," << w.label << "," << b.n << "," << b.k << "," << format_real(b.lhs) << ","
               << format_real(b.rhs) << "," << (b.ok ? 1 : 0) << "\n";
        bound_failure |= !b.ok;
      }
      for (const auto& c : w.cauchy) {
        bounds << "cauchy," << w.label << "," << c.i << "," << c.j << "," << format_real(c.lhs) << ","
               << format_real(c.rhs) << "," << (c.ok ? 1 : 0) << "\n";
        bound_failure |= !c.ok;
      }
      bound_failure |= !w.dini.tailBounded;
    }
    write_file(join(dir, "bounds.csv"), bounds.str());

    json summary = provenance(sc.name, sc.hash);
    summary["schedule"] = sc.scheduleLabel;
    summary["t"] = sc.t;
    summary["order"] = sc.order == Order::g1_first ? "12" : "21";
    summary["metric"] = sc.envelope ? "envelope: " + sc.envelope->describe() : std::string("base");
    summary["reference"] = rep.reference;
    summary["fittedRate"] = rep.saturated ? json(nullptr) : real_or_null(rep.fittedRate);
    summary["saturated"] = rep.saturated;
    summary["fitPoints"] = rep.fitPoints;
    summary["distances"] = rep.distances;
    summary["cauchyDiffs"] = rep.cauchyDiffs;
    summary["swapDistance"] = res.swapDistance;
    summary["selfConvergence"] = res.selfConvergence;
    if (!res.witnesses.empty()) {
      const auto& w = res.witnesses.front();
      summary["diniIntegral"] = w.modulus.diniIntegral;
      summary["C_hat"] = w.constant.value;
      summary["C_sample"] = w.constant.sampleDescription;
    } else {
      summary["diniIntegral"] = nullptr;
      summary["C_hat"] = nullptr;
    }
    json panel = json::array();
    for (const auto& w : res.witnesses) {
      bool bounds_ok = true, cauchy_ok = true;
      for (const auto& b : w.bounds) bounds_ok &= b.ok;
      for (const auto& c : w.cauchy) cauchy_ok &= c.ok;
      panel.push_back(json{{"label", w.label},
                           {"metric", w.metric},
                           {"C_hat", w.constant.value},
                           {"diniIntegral", w.modulus.diniIntegral},
                           {"dini", {{"integral", w.dini.integral},
                                     {"tailSum", w.dini.tailSum},
                                     {"depth", w.dini.depth},
                                     {"a", sc.config.diniRatio},
                                     {"tailBounded", w.dini.tailBounded}}},
                           {"boundsOk", bounds_ok},
                           {"cauchyOk", cauchy_ok}});
    }
    summary["witnesses"] = panel;
    summary["violations"] = rep.violations;
    summary["limit"] = measure_to_json(res.estimate.limit);
    write_file(join(dir, "summary.json"), summary.dump(2) + "\n");

    log << sc.name << ": reference=" << rep.reference << " rate="
        << (rep.saturated ? std::string("saturated") : format_real(rep.fittedRate))
        << " violations=" << rep.violations.size() << "\n";
    for (const auto& v : rep.violations) log << "  " << v << "\n";
    return bound_failure ? kExitFindings : kExitOk;
  });
}

// ---------------------------------------------------------------------------
// identities

json instance_to_json(const IdentityInstance& inst) {
  return json{{"seed", inst.seed}, {"trial", inst.trial}, {"states", inst.states},
              {"t", inst.t},       {"n", inst.n},         {"k", inst.k},
              {"j", inst.j},       {"dist", matrix_to_json(inst.dist)},
              {"Q1", matrix_to_json(inst.Q1)}, {"Q2", matrix_to_json(inst.Q2)}};
}

IdentityInstance instance_from_json(const json& j) {
  IdentityInstance inst;
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.trial = j.at("trial").get<std::uint64_t>();
  inst.states = j.at("states").get<std::size_t>();
  inst.t = j.at("t").get<double>();
  inst.n = j.at("n").get<std::size_t>();
  inst.k = j.at("k").get<std::size_t>();
  inst.j = j.at("j").get<std::size_t>();
  inst.dist = matrix_from_json(j.at("dist"), "instance.dist");
  inst.Q1 = matrix_from_json(j.at("Q1"), "instance.Q1");
  inst.Q2 = matrix_from_json(j.at("Q2"), "instance.Q2");
  return inst;
}

json identity_result_to_json(const IdentityCheckResult& r) {
  return json{{"identityName", r.name},
              {"maxDeviation", r.maxDeviation},
              {"instances", r.instances},
              {"tolerance", r.tolerance},
              {"passed", r.passed}};
}

namespace {

json report_to_json(const InstanceReport& rep) {
  json results = json::array();
  for (const auto& r : rep.results) results.push_back(identity_result_to_json(r));
  json out{{"trial", rep.instance.trial}, {"states", rep.instance.states}, {"t", rep.instance.t},
           {"n", rep.instance.n},         {"k", rep.instance.k},           {"j", rep.instance.j},
           {"passed", rep.passed},        {"results", results}};
  if (!rep.passed) out["instance"] = instance_to_json(rep.instance);
  return out;
}

}  // namespace

int run_identities(std::uint64_t seed, std::size_t trials, std::size_t max_states,
                   const std::string& out_path, std::ostream& log) {
  return guarded(log, [&]() -> int {
    if (trials == 0) throw InputError("--trials must be >= 1");
    if (max_states < 2) throw InputError("--max-states must be >= 2");
    const auto reports = run_identity_suite(seed, trials, max_states);
    const std::string config = "seed=" + std::to_string(seed) + " trials=" + std::to_string(trials) +
                               " maxStates=" + std::to_string(max_states);
    json out = provenance("identities", fnv1a_hex(config));
    out["seed"] = seed;
    out["trials"] = trials;
    out["maxStates"] = max_states;
    bool all = true;
    std::map<std::string, double> worst;
    json list = json::array();
    for (const auto& rep : reports) {
      all &= rep.passed;
      for (const auto& r : rep.results) worst[r.name] = std::max(worst[r.name], r.maxDeviation);
      list.push_back(report_to_json(rep));
    }
    out["passed"] = all;
    out["maxDeviation"] = worst;
    out["instances"] = list;
    write_file(identities_target(out_path), out.dump(2) + "\n");
    for (const auto& [name, dev] : worst) log << name << ": max deviation " << format_real(dev) << "\n";
    log << (all ? "all identities passed" : "identity failures found") << "\n";
    return all ? kExitOk : kExitFindings;
  });
}

int replay_identity_instance(const std::string& instance_path, const std::string& out_path,
                             std::ostream& log) {
  return guarded(log, [&]() -> int {
    const std::string text = read_file(instance_path);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InputError(instance_path + ": malformed JSON at byte " + std::to_string(e.byte));
    }
    if (j.contains("instance")) j = j["instance"];
    const InstanceReport rep = run_identity_instance(instance_from_json(j));
    json out = provenance("identities-replay", fnv1a_hex(text));
    out["report"] = report_to_json(rep);
    out["report"]["instance"] = instance_to_json(rep.instance);
    write_file(identities_target(out_path), out.dump(2) + "\n");
    for (const auto& r : rep.results) {
      log << r.name << ": " << format_real(r.maxDeviation) << (r.passed ? "" : " FAILED") << "\n";
    }
    return rep.passed ? kExitOk : kExitFindings;
  });
}

// ---------------------------------------------------------------------------
// diagnostics

int run_diagnostics(const std::string& scenario_path, const std::string& probe,
                    const std::string& out_dir, const ScenarioOverrides& overrides,
                    std::ostream& log) {
  return guarded(log, [&]() -> int {
    const Scenario sc = load_scenario(scenario_path, overrides);
    const Metric metric = Metric::base(sc.space);
    const DiagnosticsConfig& dc = sc.diagnostics;
    const std::size_t n_finest = dc.nFinest.value_or(sc.schedule.back());
    json header = provenance(sc.name, sc.hash);
    header["probe"] = probe;
    std::vector<std::pair<std::string, double>> rows;
    int code = kExitOk;

    const std::vector<double> times = {sc.t / 4.0, sc.t / 2.0, sc.t};
    if (probe == "equicontinuity") {
      const JitterKind kind = sc.space->is_finite() ? JitterKind::weight : JitterKind::location;
      std::vector<double> targets;
      for (double v : dc.equicontinuityTargets) {
        if (v > 0.0) targets.push_back(v);
      }
      auto perts = perturb(sc.mu0, targets, metric, kind, sc.config.seed);
      const auto family = trotter_family(sc.g1, sc.g2, times, dc.familyCounts);
      const auto eq = make_equicontinuity_probe(sc.mu0, std::move(perts), family, metric);
      const DistanceTable table = equicontinuity_modulus(eq);
      header["targets"] = targets;
      header["familyCounts"] = dc.familyCounts;
      header["times"] = times;
      header["jitter"] = kind == JitterKind::weight ? "weight" : "location";
      for (std::size_t i = 0; i < table.input.size(); ++i) {
        rows.emplace_back(format_real(table.input[i]), table.output[i]);
      }
    } else if (probe == "tightness") {
      std::vector<MarkovOperator> family;
      for (double s : times) {
        family.push_back(sc.g1.at_time(s));
        family.push_back(sc.g2.at_time(s));
      }
      for (auto& op : trotter_family(sc.g1, sc.g2, times, dc.familyCounts)) family.push_back(op);
      const TightnessProbe tp = tightness_probe(family, sc.mu0, dc.radiusGrid);
      header["radiusGrid"] = dc.radiusGrid;
      header["familySize"] = family.size();
      header["center"] = tp.center;
      header["value"] = "largest mass outside the ball over the family";
      for (std::size_t r = 0; r < dc.radiusGrid.size(); ++r) {
        const double worst = family.empty() ? 0.0 : tp.massOutside.col(static_cast<Eigen::Index>(r)).maxCoeff();
        rows.emplace_back(format_real(dc.radiusGrid[r]), worst);
      }
    } else if (probe == "feller") {
      const DistanceTable table =
          feller_continuity_check(sc.g1, sc.g2, sc.t, sc.mu0, dc.perturbSizes, n_finest, metric, sc.config.seed);
      header["sizes"] = dc.perturbSizes;
      header["nFinest"] = n_finest;
      header["t"] = sc.t;
      for (std::size_t i = 0; i < table.input.size(); ++i) {
        rows.emplace_back(format_real(table.input[i]), table.output[i]);
      }
    } else if (probe == "semigroup") {
      const double t = overrides.t ? *overrides.t : sc.t / 2.0;
      const double s = dc.s.value_or(t);
      const SemigroupLawCheck law = limit_semigroup_check(sc.g1, sc.g2, sc.mu0, t, s, n_finest, metric);
      header["t"] = t;
      header["s"] = s;
      header["nFinest"] = n_finest;
      header["sufficient"] = law.sufficient;
      rows.emplace_back("distPower", law.distPower);
      rows.emplace_back("distAdditive", law.distAdditive);
      rows.emplace_back("selfConvergence", law.selfConvergence);
      rows.emplace_back("horizon", law.horizon);
    } else if (probe == "stochastic") {
      const DistanceTable table = stochastic_continuity_check(sc.g1, sc.mu0, dc.hGrid, metric);
      header["hGrid"] = dc.hGrid;
      header["semigroup"] = sc.g1.describe();
      const bool exact = sc.g1.kind() == Semigroup::Kind::map_flow &&
                         sc.g1.flow() == Semigroup::Flow::translation && sc.mu0.atoms().size() == 1;
      if (exact) {
        double speed = 0.0;
        for (double v : sc.g1.velocity()) speed += v * v;
        speed = std::sqrt(speed);
        double err = 0.0;
        for (std::size_t i = 0; i < table.input.size(); ++i) {
          const double mass = sc.mu0.total_mass();
          const double expected = mass * dirac_distance(speed * table.input[i]);
          err = std::max(err, std::abs(table.output[i] - expected));
        }
        header["exactFormula"] = "2vh/(2+vh)";
        header["maxFormulaError"] = err;
        if (err > 1e-9) code = kExitFindings;
      }
      for (std::size_t i = 0; i < table.input.size(); ++i) {
        rows.emplace_back(format_real(table.input[i]), table.output[i]);
      }
    } else {
      throw InputError("unknown probe \"" + probe + "\"");
    }

    std::ostringstream csv;
    csv << "# " << header.dump() << "\n" << "parameter,value\n";
    for (const auto& [p, v] : rows) csv << p << "," << format_real(v) << "\n";
    write_file(join(std::filesystem::path(out_dir), probe + ".csv"), csv.str());
    log << sc.name << ": " << probe << " table with " << rows.size() << " rows\n";
    return code;
  });
}

// ---------------------------------------------------------------------------
// norm

int run_norm(const std::string& scenario_path, const std::string& measure_a,
             const std::string& measure_b, const std::string& out_path, std::ostream& log) {
  return guarded(log, [&]() -> int {
    const Scenario sc = load_scenario(scenario_path);
    auto load = [&](const std::string& path) {
      const std::string text = read_file(path);
      try {
        return signed_measure_from_json(json::parse(text), sc.space);
      } catch (const json::parse_error& e) {
        throw InputError(path + ": malformed JSON at byte " + std::to_string(e.byte));
      } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
      }
    };
    const SignedMeasure a = load(measure_a);
    const SignedMeasure b = load(measure_b);
    const BlNorm norm = bl_dual_norm(difference(a, b));
    log << format_real(norm.value) << "\n";
    if (!out_path.empty()) {
      json out = provenance(sc.name, sc.hash);
      out["distance"] = norm.value;
      out["witness"] = witness_to_json(norm.witness, *sc.space);
      write_file(out_path, out.dump(2) + "\n");
    }
    return kExitOk;
  });
}

}  // namespace trotterkit
