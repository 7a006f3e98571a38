#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "trotterkit/identities.hpp"
#include "trotterkit/scenario.hpp"

namespace trotterkit {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitFindings = 2 };

/// Writes report.csv, summary.json, modulus.csv and bounds.csv into out_dir.
int run_study(const std::string& scenario_path, const std::string& out_dir,
              const ScenarioOverrides& overrides, std::ostream& log);

/// Writes the suite result as JSON to out_path (a .json file, or
/// identities.json inside a directory).
int run_identities(std::uint64_t seed, std::size_t trials, std::size_t max_states,
                   const std::string& out_path, std::ostream& log);

/// Reruns one serialized instance and writes its results to out_path.
int replay_identity_instance(const std::string& instance_path, const std::string& out_path,
                             std::ostream& log);

json instance_to_json(const IdentityInstance& inst);
IdentityInstance instance_from_json(const json& j);
json identity_result_to_json(const IdentityCheckResult& r);

/// probe: equicontinuity | tightness | feller | semigroup | stochastic.
/// Writes <probe>.csv into out_dir.
int run_diagnostics(const std::string& scenario_path, const std::string& probe,
                    const std::string& out_dir, const ScenarioOverrides& overrides,
                    std::ostream& log);

/// BL distance between two measure files on the scenario's space, printed to
/// `log` (and written to out_path when nonempty).
int run_norm(const std::string& scenario_path, const std::string& measure_a,
             const std::string& measure_b, const std::string& out_path, std::ostream& log);

}  // namespace trotterkit
