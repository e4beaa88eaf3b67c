// Command-line driver for the scenario registry.
//
//   qhydro run <config.json> [--output-dir DIR] [--seed N] [--threads N]
//   qhydro verify <config.json> [--seed N] [--threads N]
//   qhydro validate <config.json>
//   qhydro list-scenarios
//
// Exit status: 0 all invariants pass, 1 an invariant failed or the run
// aborted, 2 configuration or usage error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "qhydro/config.hpp"
#include "qhydro/scenario.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

qhydro::ScenarioConfig load(const std::string& path, const std::optional<std::string>& output_dir,
                            const std::optional<std::uint64_t>& seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qhydro::ConfigError(path + ": cannot read config file");
  std::ostringstream text;
  text << in.rdbuf();
  qhydro::ScenarioConfig config = qhydro::parse_config(text.str());
  if (output_dir) config.output.directory = *output_dir;
  if (seed) {
    config.bohm.seed = *seed;
    config.brownian.seed = *seed;
  }
  qhydro::validate(config);
  return config;
}

void print_summary(const qhydro::RunReport& report) {
  for (const auto& r : report.invariants) {
    std::printf("%-4s %-40s %.6g %s %.6g\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.value,
                r.relation.c_str(), r.tolerance);
  }
  std::printf("%s: %s\n", qhydro::to_string(report.config.scenario).c_str(),
              report.passed() ? "all invariants pass" : "invariant failure");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum hydrodynamics scenario runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;

  auto* run = app.add_subcommand("run", "Run a scenario, export artifacts and report.json");
  run->add_option("config", config_path, "Scenario config (JSON)")->required();
  run->add_option("--output-dir", output_dir, "Override output.directory");
  run->add_option("--seed", seed, "Override the Bohm and Brownian seeds");
  run->add_option("--threads", threads, "OpenMP thread count (0 = runtime default)");

  auto* verify = app.add_subcommand("verify", "Run a scenario and check invariants only");
  verify->add_option("config", config_path, "Scenario config (JSON)")->required();
  verify->add_option("--seed", seed, "Override the Bohm and Brownian seeds");
  verify->add_option("--threads", threads, "OpenMP thread count (0 = runtime default)");

  auto* validate = app.add_subcommand("validate", "Parse and validate a config, print it resolved");
  validate->add_option("config", config_path, "Scenario config (JSON)")->required();

  app.add_subcommand("list-scenarios", "List available scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (app.got_subcommand("list-scenarios")) {
    for (auto id : qhydro::all_scenarios()) {
      std::printf("%-24s %s\n", qhydro::to_string(id).c_str(), std::string(qhydro::describe(id)).c_str());
    }
    return kExitPass;
  }
  if (threads < 0) {
    std::cerr << "--threads: must be non-negative\n";
    return kExitConfig;
  }
  if (threads > 0) omp_set_num_threads(threads);

  qhydro::ScenarioConfig config;
  try {
    config = load(config_path, output_dir, seed);
  } catch (const qhydro::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (app.got_subcommand("validate")) {
    std::cout << qhydro::to_json(config).dump(2) << '\n';
    return kExitPass;
  }

  try {
    qhydro::RunOptions options;
    options.export_artifacts = app.got_subcommand("run");
    const qhydro::RunReport report = qhydro::run_scenario(config, options);
    print_summary(report);
    return report.passed() ? kExitPass : kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
