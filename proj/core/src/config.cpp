#include "qhydro/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <utility>

namespace qhydro {
namespace {

using nlohmann::json;

struct ScenarioInfo {
  ScenarioId id;
  const char* name;
  const char* summary;
};

constexpr std::array<ScenarioInfo, 10> kScenarios{{
    {ScenarioId::free_packet, "free_packet", "free Gaussian spreading, hydrodynamic residuals, equivariance"},
    {ScenarioId::harmonic_ground, "harmonic_ground", "harmonic ground state, frozen trajectories"},
    {ScenarioId::harmonic_coherent, "harmonic_coherent", "displaced Gaussian in a harmonic well, Ehrenfest, classical Wigner flow"},
    {ScenarioId::quartic_packet, "quartic_packet", "Gaussian in a quartic well, Moyal series against split-step"},
    {ScenarioId::double_well, "double_well", "tunnelling packet, trajectory ordering, Wigner negativity"},
    {ScenarioId::two_particle_product, "two_particle_product", "product state, additive quantum potential"},
    {ScenarioId::two_particle_entangled, "two_particle_entangled", "symmetrized pair, non-separable quantum potential"},
    {ScenarioId::brownian_harmonic, "brownian_harmonic", "Langevin ensemble in a harmonic well, equipartition and Boltzmann"},
    {ScenarioId::brownian_doublewell, "brownian_doublewell", "Langevin ensemble in a double well, Boltzmann mixing"},
    {ScenarioId::meanfield_contrast, "meanfield_contrast", "mean-field thermal Newton law against Langevin paths"},
}};

const ScenarioInfo& info(ScenarioId id) {
  return *std::find_if(kScenarios.begin(), kScenarios.end(),
                       [&](const ScenarioInfo& s) { return s.id == id; });
}

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

bool divides(double step, double total) {
  const double q = std::round(total / step);
  return q >= 1.0 && std::abs(q * step - total) <= 1e-9 * total;
}

std::size_t step_count(double step, double total) {
  return static_cast<std::size_t>(std::round(total / step));
}

// Reads known keys from one JSON object and rejects the rest.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  std::string key(const std::string& name) const {
    return path_.empty() ? name : path_ + "." + name;
  }

  const json* find(const std::string& name) {
    seen_.insert(name);
    const auto it = node_.find(name);
    return it == node_.end() ? nullptr : &*it;
  }

  void number(const std::string& name, double& out) {
    if (const json* v = find(name)) {
      if (!v->is_number()) throw ConfigError(key(name) + ": expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(key(name) + ": must be finite");
    }
  }

  template <class Int>
  void integer(const std::string& name, Int& out) {
    if (const json* v = find(name)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() &&
                                      v->get<std::int64_t>() < 0)) {
        throw ConfigError(key(name) + ": expected a non-negative integer");
      }
      out = v->get<Int>();
    }
  }

  void signed_integer(const std::string& name, int& out) {
    if (const json* v = find(name)) {
      if (!v->is_number_integer()) throw ConfigError(key(name) + ": expected an integer");
      out = v->get<int>();
    }
  }

  void boolean(const std::string& name, bool& out) {
    if (const json* v = find(name)) {
      if (!v->is_boolean()) throw ConfigError(key(name) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void text(const std::string& name, std::string& out) {
    if (const json* v = find(name)) {
      if (!v->is_string()) throw ConfigError(key(name) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void strings(const std::string& name, std::vector<std::string>& out) {
    if (const json* v = find(name)) {
      if (!v->is_array()) throw ConfigError(key(name) + ": expected an array of strings");
      out.clear();
      for (const json& e : *v) {
        if (!e.is_string()) throw ConfigError(key(name) + ": expected an array of strings");
        out.push_back(e.get<std::string>());
      }
    }
  }

  template <class Fn>
  void object(const std::string& name, Fn&& fn) {
    if (const json* v = find(name)) {
      Section child(*v, key(name));
      fn(child);
      child.finish();
    }
  }

  void finish() const {
    for (const auto& [k, _] : node_.items()) {
      if (!seen_.count(k)) throw ConfigError(key(k) + ": unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& rule) {
  if (!ok) throw ConfigError(key + ": " + rule);
}

bool pair_scenario(ScenarioId id) {
  return id == ScenarioId::two_particle_product || id == ScenarioId::two_particle_entangled;
}

bool brownian_scenario(ScenarioId id) {
  return id == ScenarioId::brownian_harmonic || id == ScenarioId::brownian_doublewell ||
         id == ScenarioId::meanfield_contrast;
}

}  // namespace

std::string to_string(ScenarioId id) { return info(id).name; }

std::optional<ScenarioId> parse_scenario_id(std::string_view name) {
  for (const auto& s : kScenarios) {
    if (name == s.name) return s.id;
  }
  return std::nullopt;
}

const std::vector<ScenarioId>& all_scenarios() {
  static const std::vector<ScenarioId> ids = [] {
    std::vector<ScenarioId> v;
    for (const auto& s : kScenarios) v.push_back(s.id);
    return v;
  }();
  return ids;
}

std::string_view describe(ScenarioId id) { return info(id).summary; }

bool ScenarioConfig::writes(std::string_view format) const {
  return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

ScenarioConfig default_config(ScenarioId id) {
  ScenarioConfig c;
  c.scenario = id;
  switch (id) {
    case ScenarioId::free_packet:
      break;
    case ScenarioId::harmonic_ground:
      c.potential.kind = "harmonic";
      c.state.kind = "eigenstate";
      c.time = {1e-4, 1.0, 100};
      c.bohm = {1000, 1, 1e-4};
      break;
    case ScenarioId::harmonic_coherent:
      c.potential.kind = "harmonic";
      c.state = {.kind = "gaussian", .x0 = 2.0, .sigma = std::sqrt(0.5)};
      c.time = {5e-4, 5.0, 20};
      c.bohm.n_paths = 1000;
      c.wigner = {.enabled = true, .k_max = 0, .t_final = 1.0};
      break;
    case ScenarioId::quartic_packet:
      c.potential = {.kind = "quartic", .lambda = 0.1};
      c.state = {.kind = "gaussian", .x0 = 1.0, .sigma = 1.0};
      c.time = {2.5e-4, 2.0, 40};
      c.bohm.n_paths = 1000;
      c.wigner = {.enabled = true, .k_max = 1, .t_final = 0.5};
      break;
    case ScenarioId::double_well:
      c.potential = {.kind = "double_well", .a = 1.0, .b = 1.0};
      c.state = {.kind = "gaussian", .x0 = -1.0, .sigma = 0.5};
      c.time = {2.5e-4, 2.0, 40};
      c.bohm.n_paths = 1000;
      c.wigner = {.enabled = true, .k_max = 2, .t_final = 1.0};
      break;
    case ScenarioId::two_particle_product:
      c.grid = {256, 40.0, -20.0};
      c.potential.kind = "harmonic";
      c.state = {.kind = "product", .x0 = 1.0, .sigma = 1.0};
      c.time = {1e-3, 0.5, 100};
      break;
    case ScenarioId::two_particle_entangled:
      c.grid = {256, 40.0, -20.0};
      c.potential.kind = "harmonic";
      c.state = {.kind = "entangled", .sigma = 1.0, .separation = 2.0};
      c.time = {1e-3, 0.5, 100};
      break;
    case ScenarioId::brownian_harmonic:
      c.potential.kind = "harmonic";
      break;
    case ScenarioId::brownian_doublewell:
      c.potential = {.kind = "double_well", .a = 1.0, .b = 1.0};
      c.brownian.temperature = 0.5;
      c.brownian.t_final = 100.0;
      c.brownian.record_stride = 100;
      c.brownian.x0 = -1.0;
      c.brownian.stationary_from = 50.0;
      break;
    case ScenarioId::meanfield_contrast:
      c.potential.kind = "harmonic";
      c.brownian.t_final = 20.0;
      c.brownian.thermal_start = true;
      break;
  }
  return c;
}

void validate(const ScenarioConfig& c) {
  require(is_power_of_two(c.grid.n), "grid.n", "must be a power of two >= 2 (got " + std::to_string(c.grid.n) + ")");
  require(c.grid.length > 0.0, "grid.L", "must be positive");
  require(c.constants.hbar > 0.0, "constants.hbar", "must be positive");
  require(c.constants.mass > 0.0, "constants.mass", "must be positive");

  require(c.time.dt > 0.0, "time.dt", "must be positive");
  require(c.time.t_final > 0.0, "time.t_final", "must be positive");
  require(divides(c.time.dt, c.time.t_final), "time.t_final", "must be a whole number of time.dt steps");
  require(c.time.frame_stride >= 1, "time.frame_stride", "must be at least 1");
  require(step_count(c.time.dt, c.time.t_final) % c.time.frame_stride == 0, "time.frame_stride",
          "must divide the number of steps t_final / dt");

  static const std::set<std::string> potentials{"free", "harmonic", "quartic", "double_well"};
  require(potentials.count(c.potential.kind) == 1, "potential.kind",
          "must be one of free, harmonic, quartic, double_well");
  if (c.potential.kind == "harmonic") require(c.potential.omega > 0.0, "potential.omega", "must be positive");
  if (c.potential.kind == "quartic") {
    require(c.potential.lambda >= 0.0, "potential.lambda", "must be non-negative");
    require(c.potential.quadratic >= 0.0, "potential.quadratic", "must be non-negative");
  }
  if (c.potential.kind == "double_well") {
    require(c.potential.a > 0.0, "potential.a", "must be positive");
    require(c.potential.b > 0.0, "potential.b", "must be positive");
  }

  const bool pair = pair_scenario(c.scenario);
  if (pair) {
    require(c.state.kind == "product" || c.state.kind == "entangled", "state.kind",
            "must be product or entangled for two-particle scenarios");
  } else {
    require(c.state.kind == "gaussian" || c.state.kind == "eigenstate", "state.kind",
            "must be gaussian or eigenstate");
  }
  if (c.state.kind == "eigenstate") {
    require(c.potential.kind == "harmonic", "state.kind", "eigenstate requires a harmonic potential");
  }
  require(c.state.sigma > 0.0, "state.sigma", "must be positive");
  require(c.state.separation >= 0.0, "state.separation", "must be non-negative");

  require(c.bohm.n_paths >= 1, "bohm.n_paths", "must be at least 1");
  require(c.bohm.dt > 0.0, "bohm.dt", "must be positive");

  require(c.wigner.k_max >= 0 && c.wigner.k_max <= 2, "wigner.k_max", "must be 0, 1 or 2");
  require(is_power_of_two(c.wigner.n), "wigner.n", "must be a power of two >= 2");
  require(c.wigner.length > 0.0, "wigner.L", "must be positive");
  require(c.wigner.dt > 0.0 && c.wigner.dt <= 0.1, "wigner.dt", "must be in (0, 0.1]");
  require(c.wigner.t_final > 0.0 && divides(c.wigner.dt, c.wigner.t_final), "wigner.t_final",
          "must be a positive whole number of wigner.dt steps");

  const auto& b = c.brownian;
  require(b.friction > 0.0, "brownian.friction", "must be positive");
  require(b.temperature >= 0.0, "brownian.temperature", "must be non-negative");
  require(b.dt > 0.0, "brownian.dt", "must be positive");
  require(b.t_final > 0.0 && divides(b.dt, b.t_final), "brownian.t_final",
          "must be a positive whole number of brownian.dt steps");
  require(b.n_paths >= 1, "brownian.n_paths", "must be at least 1");
  require(b.record_stride >= 1, "brownian.record_stride", "must be at least 1");
  require(step_count(b.dt, b.t_final) % b.record_stride == 0, "brownian.record_stride",
          "must divide the number of steps t_final / dt");
  require(b.bandwidth_factor > 0.0, "brownian.bandwidth_factor", "must be positive");
  require(b.stationary_from >= 0.0 && b.stationary_from < b.t_final, "brownian.stationary_from",
          "must lie in [0, t_final)");
  if (brownian_scenario(c.scenario)) {
    require(c.potential.kind != "free", "potential.kind",
            "Brownian scenarios need a confining potential");
    require(b.temperature > 0.0, "brownian.temperature", "must be positive for Brownian scenarios");
  }
  if (c.scenario == ScenarioId::meanfield_contrast) {
    require(b.n_paths >= 1000, "brownian.n_paths", "mean-field runs need at least 1000 paths");
    require(c.potential.kind == "harmonic", "potential.kind",
            "meanfield_contrast compares against the harmonic equilibrium");
  }
  if (b.thermal_start) {
    require(c.potential.kind == "harmonic", "brownian.thermal_start",
            "needs a harmonic potential (equilibrium is Gaussian)");
  }

  require(c.madelung.rho_floor > 0.0 && c.madelung.rho_floor < 1.0, "madelung.rho_floor",
          "must lie in (0, 1) (relative to max rho)");

  require(!c.output.directory.empty(), "output.directory", "must not be empty");
  for (const auto& f : c.output.formats) {
    require(f == "csv" || f == "json", "output.formats", "entries must be csv or json (got " + f + ")");
  }
}

ScenarioConfig parse_config_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  const auto it = doc.find("scenario");
  if (it == doc.end()) throw ConfigError("scenario: missing required field");
  if (!it->is_string()) throw ConfigError("scenario: expected a string");
  const auto id = parse_scenario_id(it->get<std::string>());
  if (!id) throw ConfigError("scenario: unknown scenario '" + it->get<std::string>() + "'");

  ScenarioConfig c = default_config(*id);
  Section root(doc, "");
  root.find("scenario");
  root.object("grid", [&](Section& s) {
    s.integer("n", c.grid.n);
    const bool has_origin = s.find("origin") != nullptr;
    s.number("L", c.grid.length);
    if (has_origin) {
      s.number("origin", c.grid.origin);
    } else {
      c.grid.origin = -0.5 * c.grid.length;
    }
  });
  root.object("constants", [&](Section& s) {
    s.number("hbar", c.constants.hbar);
    s.number("mass", c.constants.mass);
  });
  root.object("time", [&](Section& s) {
    s.number("dt", c.time.dt);
    s.number("t_final", c.time.t_final);
    s.integer("frame_stride", c.time.frame_stride);
  });
  root.object("potential", [&](Section& s) {
    s.text("kind", c.potential.kind);
    s.number("omega", c.potential.omega);
    s.number("lambda", c.potential.lambda);
    s.number("quadratic", c.potential.quadratic);
    s.number("a", c.potential.a);
    s.number("b", c.potential.b);
  });
  root.object("state", [&](Section& s) {
    s.text("kind", c.state.kind);
    s.number("x0", c.state.x0);
    s.number("p0", c.state.p0);
    s.number("sigma", c.state.sigma);
    s.integer("level", c.state.level);
    s.boolean("discrete_eigenstate", c.state.discrete_eigenstate);
    s.number("separation", c.state.separation);
  });
  root.object("bohm", [&](Section& s) {
    s.integer("n_paths", c.bohm.n_paths);
    s.integer("seed", c.bohm.seed);
    s.number("dt", c.bohm.dt);
  });
  root.object("wigner", [&](Section& s) {
    s.boolean("enabled", c.wigner.enabled);
    s.signed_integer("k_max", c.wigner.k_max);
    s.integer("n", c.wigner.n);
    s.number("L", c.wigner.length);
    s.number("dt", c.wigner.dt);
    s.number("t_final", c.wigner.t_final);
  });
  root.object("brownian", [&](Section& s) {
    auto& b = c.brownian;
    s.number("friction", b.friction);
    s.number("temperature", b.temperature);
    s.number("dt", b.dt);
    s.number("t_final", b.t_final);
    s.integer("n_paths", b.n_paths);
    s.integer("seed", b.seed);
    s.integer("record_stride", b.record_stride);
    s.number("x0", b.x0);
    s.boolean("thermal_start", b.thermal_start);
    s.number("bandwidth_factor", b.bandwidth_factor);
    s.number("stationary_from", b.stationary_from);
  });
  root.object("madelung", [&](Section& s) { s.number("rho_floor", c.madelung.rho_floor); });
  root.object("output", [&](Section& s) {
    s.text("directory", c.output.directory);
    s.strings("formats", c.output.formats);
    s.integer("max_exported_paths", c.output.max_exported_paths);
  });
  root.finish();
  validate(c);
  return c;
}

ScenarioConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_config_json(doc);
}

nlohmann::ordered_json to_json(const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  j["scenario"] = to_string(c.scenario);
  j["grid"] = {{"n", c.grid.n}, {"L", c.grid.length}, {"origin", c.grid.origin}};
  j["constants"] = {{"hbar", c.constants.hbar}, {"mass", c.constants.mass}};
  j["time"] = {{"dt", c.time.dt}, {"t_final", c.time.t_final}, {"frame_stride", c.time.frame_stride}};
  j["potential"] = {{"kind", c.potential.kind},     {"omega", c.potential.omega},
                    {"lambda", c.potential.lambda}, {"quadratic", c.potential.quadratic},
                    {"a", c.potential.a},           {"b", c.potential.b}};
  j["state"] = {{"kind", c.state.kind},
                {"x0", c.state.x0},
                {"p0", c.state.p0},
                {"sigma", c.state.sigma},
                {"level", c.state.level},
                {"discrete_eigenstate", c.state.discrete_eigenstate},
                {"separation", c.state.separation}};
  j["bohm"] = {{"n_paths", c.bohm.n_paths}, {"seed", c.bohm.seed}, {"dt", c.bohm.dt}};
  j["wigner"] = {{"enabled", c.wigner.enabled}, {"k_max", c.wigner.k_max}, {"n", c.wigner.n},
                 {"L", c.wigner.length},        {"dt", c.wigner.dt},       {"t_final", c.wigner.t_final}};
  const auto& b = c.brownian;
  j["brownian"] = {{"friction", b.friction},
                   {"temperature", b.temperature},
                   {"dt", b.dt},
                   {"t_final", b.t_final},
                   {"n_paths", b.n_paths},
                   {"seed", b.seed},
                   {"record_stride", b.record_stride},
                   {"x0", b.x0},
                   {"thermal_start", b.thermal_start},
                   {"bandwidth_factor", b.bandwidth_factor},
                   {"stationary_from", b.stationary_from}};
  j["madelung"] = {{"rho_floor", c.madelung.rho_floor}};
  j["output"] = {{"directory", c.output.directory},
                 {"formats", c.output.formats},
                 {"max_exported_paths", c.output.max_exported_paths}};
  return j;
}

}  // namespace qhydro
