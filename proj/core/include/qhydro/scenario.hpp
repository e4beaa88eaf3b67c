#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qhydro/artifacts.hpp"
#include "qhydro/config.hpp"

namespace qhydro {

/// One checked property: passed iff `value relation tolerance` holds.
struct InvariantResult {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<", "<=", ">" or ">="
  double tolerance = 0.0;
  bool passed = false;
};

InvariantResult check(std::string name, double value, std::string relation, double tolerance);

struct RunReport {
  ScenarioConfig config;
  std::vector<InvariantResult> invariants;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  std::vector<ArtifactEntry> artifacts;

  bool passed() const;
  const InvariantResult* find(const std::string& name) const;
  nlohmann::ordered_json to_json() const;
};

struct RunOptions {
  bool export_artifacts = true;
};

/// Module failure inside a scenario; the message is prefixed by the scenario name.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs the scenario pipeline, evaluates its invariants and, when exporting,
/// writes the CSV artifacts and report.json into config.output.directory.
RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// True when every manifest entry exists in `directory` with a matching hash.
bool verify_manifest(const RunReport& report, const std::filesystem::path& directory);

}  // namespace qhydro
