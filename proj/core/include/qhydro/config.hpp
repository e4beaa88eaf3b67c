#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace qhydro {

enum class ScenarioId {
  free_packet,
  harmonic_ground,
  harmonic_coherent,
  quartic_packet,
  double_well,
  two_particle_product,
  two_particle_entangled,
  brownian_harmonic,
  brownian_doublewell,
  meanfield_contrast,
};

std::string to_string(ScenarioId id);
std::optional<ScenarioId> parse_scenario_id(std::string_view name);
const std::vector<ScenarioId>& all_scenarios();
std::string_view describe(ScenarioId id);

/// Invalid configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridConfig {
  std::size_t n = 512;
  double length = 40.0;
  double origin = -20.0;  // -length / 2 unless given
  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct ConstantsConfig {
  double hbar = 1.0;
  double mass = 1.0;
  friend bool operator==(const ConstantsConfig&, const ConstantsConfig&) = default;
};

struct TimeConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  std::size_t frame_stride = 10;
  friend bool operator==(const TimeConfig&, const TimeConfig&) = default;
};

/// kind: free | harmonic | quartic | double_well.
///   harmonic:    m omega^2 x^2 / 2
///   quartic:     quadratic x^2 + lambda x^4
///   double_well: a (x^2 - b)^2
struct PotentialConfig {
  std::string kind = "free";
  double omega = 1.0;
  double lambda = 0.0;
  double quadratic = 0.0;
  double a = 1.0;
  double b = 1.0;
  friend bool operator==(const PotentialConfig&, const PotentialConfig&) = default;
};

/// kind: gaussian | eigenstate (single particle), product | entangled (pairs).
struct StateConfig {
  std::string kind = "gaussian";
  double x0 = 0.0;
  double p0 = 0.0;
  double sigma = 1.0;
  unsigned level = 0;
  bool discrete_eigenstate = true;  // eigenstate of the propagator at time.dt
  double separation = 2.0;
  friend bool operator==(const StateConfig&, const StateConfig&) = default;
};

struct BohmConfig {
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  double dt = 1e-3;
  friend bool operator==(const BohmConfig&, const BohmConfig&) = default;
};

struct WignerConfig {
  bool enabled = false;
  int k_max = 1;
  std::size_t n = 128;
  double length = 24.0;
  double dt = 1e-3;
  double t_final = 0.5;
  friend bool operator==(const WignerConfig&, const WignerConfig&) = default;
};

struct BrownianConfig {
  double friction = 1.0;
  double temperature = 1.0;
  double dt = 0.01;
  double t_final = 50.0;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  std::size_t record_stride = 10;
  double x0 = 0.0;                 // delta start unless thermal_start
  bool thermal_start = false;      // start from the harmonic equilibrium
  double bandwidth_factor = 1.0;
  double stationary_from = 10.0;   // start of the stationary segment for statistics
  friend bool operator==(const BrownianConfig&, const BrownianConfig&) = default;
};

struct MadelungConfig {
  double rho_floor = 1e-8;  // relative to max rho
  friend bool operator==(const MadelungConfig&, const MadelungConfig&) = default;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats = {"csv", "json"};
  std::size_t max_exported_paths = 100;
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ScenarioConfig {
  ScenarioId scenario = ScenarioId::free_packet;
  GridConfig grid;
  ConstantsConfig constants;
  TimeConfig time;
  PotentialConfig potential;
  StateConfig state;
  BohmConfig bohm;
  WignerConfig wigner;
  BrownianConfig brownian;
  MadelungConfig madelung;
  OutputConfig output;

  bool writes(std::string_view format) const;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Fully resolved defaults for a scenario.
ScenarioConfig default_config(ScenarioId id);

/// Strict parse: the document must name a scenario; every other key
/// overrides that scenario's defaults. Unknown keys and constraint
/// violations raise ConfigError naming the key.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig parse_config_json(const nlohmann::json& document);

void validate(const ScenarioConfig& config);

nlohmann::ordered_json to_json(const ScenarioConfig& config);

}  // namespace qhydro
