#include "qhydro/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "qhydro/analysis.hpp"
#include "qhydro/bohm.hpp"
#include "qhydro/brownian.hpp"
#include "qhydro/madelung.hpp"
#include "qhydro/schrodinger.hpp"
#include "qhydro/wigner.hpp"

namespace qhydro {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

InvariantResult check(std::string name, double value, std::string relation, double tolerance) {
  bool ok = false;
  if (relation == "<") {
    ok = value < tolerance;
  } else if (relation == "<=") {
    ok = value <= tolerance;
  } else if (relation == ">") {
    ok = value > tolerance;
  } else if (relation == ">=") {
    ok = value >= tolerance;
  } else {
    throw std::invalid_argument("check: unknown relation " + relation);
  }
  if (!std::isfinite(value)) ok = false;
  return {std::move(name), value, std::move(relation), tolerance, ok};
}

bool RunReport::passed() const {
  return std::all_of(invariants.begin(), invariants.end(),
                     [](const InvariantResult& r) { return r.passed; });
}

const InvariantResult* RunReport::find(const std::string& name) const {
  for (const auto& r : invariants) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

ordered_json RunReport::to_json() const {
  ordered_json j;
  j["scenario"] = to_string(config.scenario);
  j["passed"] = passed();
  j["config"] = qhydro::to_json(config);
  ordered_json inv = ordered_json::array();
  for (const auto& r : invariants) {
    inv.push_back({{"name", r.name},
                   {"value", r.value},
                   {"relation", r.relation},
                   {"tolerance", r.tolerance},
                   {"passed", r.passed}});
  }
  j["invariants"] = inv;
  j["metrics"] = metrics;
  ordered_json files = ordered_json::array();
  for (const auto& a : artifacts) {
    files.push_back({{"file", a.file}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  }
  j["artifacts"] = files;
  return j;
}

bool verify_manifest(const RunReport& report, const fs::path& directory) {
  for (const auto& a : report.artifacts) {
    const fs::path p = directory / a.file;
    if (!fs::exists(p) || sha256_file(p) != a.sha256) return false;
  }
  return true;
}

namespace {

PhysicalConstants constants_of(const ScenarioConfig& c) {
  return {c.constants.hbar, c.constants.mass};
}

Potential make_potential(const PotentialConfig& p, const Grid& grid, double mass) {
  if (p.kind == "free") return Potential::free(grid);
  if (p.kind == "harmonic") return Potential::harmonic(grid, p.omega, mass);
  if (p.kind == "quartic") return Potential::quartic(grid, p.lambda, p.quadratic);
  return Potential::double_well(grid, p.a, p.b);
}

StateSpec make_state(const ScenarioConfig& c, double dt) {
  const auto& s = c.state;
  if (s.kind == "eigenstate") {
    return HarmonicEigenstate{c.potential.omega, s.level, s.x0, s.discrete_eigenstate ? dt : 0.0};
  }
  return GaussianState{s.x0, s.p0, s.sigma};
}

double relative_change(double before, double after) {
  const double scale = std::abs(before);
  return scale > 0.0 ? std::abs(after - before) / scale : std::abs(after - before);
}

class Runner {
 public:
  Runner(const ScenarioConfig& config, const RunOptions& options)
      : c_(config), options_(options), dir_(config.output.directory) {
    report_.config = config;
  }

  RunReport run() {
    if (exporting()) fs::create_directories(dir_);
    switch (c_.scenario) {
      case ScenarioId::free_packet:
      case ScenarioId::harmonic_ground:
      case ScenarioId::harmonic_coherent:
      case ScenarioId::quartic_packet:
      case ScenarioId::double_well:
        wave_scenario();
        break;
      case ScenarioId::two_particle_product:
      case ScenarioId::two_particle_entangled:
        pair_scenario();
        break;
      case ScenarioId::brownian_harmonic:
      case ScenarioId::brownian_doublewell:
        brownian_scenario();
        break;
      case ScenarioId::meanfield_contrast:
        meanfield_scenario();
        break;
    }
    if (exporting() && c_.writes("json")) {
      std::ofstream out(dir_ / "report.json", std::ios::binary);
      out << report_.to_json().dump(2) << '\n';
      if (!out) throw std::runtime_error("cannot write report.json");
    }
    return std::move(report_);
  }

 private:
  bool exporting() const { return options_.export_artifacts; }
  bool csv() const { return exporting() && c_.writes("csv"); }

  void add(std::string name, double value, std::string relation, double tolerance) {
    report_.invariants.push_back(check(std::move(name), value, std::move(relation), tolerance));
  }
  void metric(const std::string& name, ordered_json value) { report_.metrics[name] = std::move(value); }
  void artifact(const std::string& file) { report_.artifacts.push_back(make_entry(dir_, file)); }

  // --- single-particle wave scenarios ---------------------------------------

  void wave_scenario() {
    const PhysicalConstants k = constants_of(c_);
    const Grid grid(c_.grid.n, c_.grid.length, c_.grid.origin);
    const Potential u = make_potential(c_.potential, grid, k.mass);
    const double dt = c_.time.dt;
    const std::size_t n_steps = static_cast<std::size_t>(std::llround(c_.time.t_final / dt));
    const std::size_t stride = c_.time.frame_stride;
    const double floor = c_.madelung.rho_floor;

    WaveField psi = init_state(make_state(c_, dt), grid, k);
    const SplitStepPropagator prop(u, k, dt);
    const Observables obs0 = observables(psi, u);

    std::vector<TraceSample> trace{sample_trace(psi, u)};
    std::vector<MadelungFields> frames{decompose(psi, floor)};
    WaveField prev2 = psi;
    WaveField prev1 = psi;
    for (std::size_t s = 1; s <= n_steps; ++s) {
      prev2 = prev1;
      prev1 = psi;
      prop.advance(psi);
      psi.time = static_cast<double>(s) * dt;
      trace.push_back(sample_trace(psi, u));
      if (s % stride == 0) frames.push_back(decompose(psi, floor));
    }
    const Observables obs1 = observables(psi, u);
    const double t_final = psi.time;

    add("norm_drift", std::abs(obs1.norm - obs0.norm), "<", 1e-9);
    add("energy_relative_drift", relative_change(obs0.energy, obs1.energy), "<", 1e-7);
    const EhrenfestResidual ehr = ehrenfest_residual(trace, k.mass);
    add("ehrenfest_position", ehr.r1, "<", 1e-5);
    add("ehrenfest_momentum", ehr.r2, "<", 1e-5);
    metric("var_x_final", obs1.var_x);
    metric("mean_x_final", obs1.mean_x);
    metric("mean_p_final", obs1.mean_p);
    metric("energy", obs0.energy);

    const MadelungFields before = decompose(prev2, floor);
    const MadelungFields now = decompose(prev1, floor);
    const MadelungFields& after = frames.back();
    const Residual cont = continuity_residual(before, now, after, dt);
    const Residual force = force_balance_residual(before, now, after, u, dt);
    metric("continuity_residual", cont.normalized);
    metric("force_balance_residual", force.normalized);
    const FisherComparison fisher = mean_q_vs_fisher(frames.front().rho, k, floor);
    metric("mean_q_initial", fisher.mean_q);
    metric("fisher_scaled_initial", fisher.fisher_scaled);

    switch (c_.scenario) {
      case ScenarioId::free_packet: {
        const double s0 = c_.state.sigma;
        const double spread = k.hbar * t_final / (2.0 * k.mass * s0);
        const double analytic = s0 * s0 + spread * spread;
        add("var_x_spreading_law", std::abs(obs1.var_x - analytic), "<", 1e-6);
        add("continuity_residual", cont.normalized, "<", 1e-3);
        add("force_balance_residual", force.normalized, "<", 5e-3);
        add("fisher_identity", std::abs(fisher.mean_q - fisher.fisher_scaled), "<", 1e-6);
        break;
      }
      case ScenarioId::harmonic_ground: {
        double worst_force = 0.0;
        double worst_v = 0.0;
        for (const auto& f : frames) {
          worst_force = std::max(worst_force, total_force_magnitude(f, u));
          for (std::size_t j = 0; j < grid.size(); ++j) {
            if (f.mask[j]) worst_v = std::max(worst_v, std::abs(f.V.values[j]));
          }
        }
        double initial_v = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
          if (frames.front().mask[j]) initial_v = std::max(initial_v, std::abs(frames.front().V.values[j]));
        }
        add("total_force_magnitude", worst_force, "<", 1e-6);
        add("initial_velocity", initial_v, "<", 1e-10);
        metric("max_velocity", worst_v);
        add("continuity_residual", cont.normalized, "<", 1e-8);
        add("force_balance_residual", force.normalized, "<", 1e-6);
        break;
      }
      case ScenarioId::harmonic_coherent: {
        const double omega = c_.potential.omega;
        const double x_t = c_.state.x0 * std::cos(omega * t_final) +
                           c_.state.p0 / (k.mass * omega) * std::sin(omega * t_final);
        add("mean_x_classical", std::abs(obs1.mean_x - x_t), "<", 1e-5);
        add("continuity_residual", cont.normalized, "<", 1e-3);
        add("force_balance_residual", force.normalized, "<", 1e-3);
        break;
      }
      default:
        break;
    }

    trajectories(frames, u);
    if (c_.wigner.enabled) wigner_checks(k);
    if (csv()) {
      write_fields_csv(dir_ / "fields.csv", frames);
      artifact("fields.csv");
    }
  }

  void trajectories(const std::vector<MadelungFields>& frames, const Potential& u) {
    std::vector<MadelungFields> copy = frames;
    const FieldTape tape(std::move(copy), u);
    const auto x0 = sample_initial(tape.frame(0).rho, c_.bohm.n_paths, c_.bohm.seed);
    const TrajectoryEnsemble ens = integrate_guidance(tape, x0, c_.bohm.dt, c_.bohm.seed);
    const double t_end = tape.end_time();
    const double ks = equivariance_distance(ens, tape, t_end);
    const std::size_t valid = ens.n_paths() - ens.flagged_count();
    metric("flagged_paths", ens.flagged_count());
    metric("equivariance_ks", ks);
    metric("ks_critical_99", ks_critical_99(valid));
    if (c_.scenario == ScenarioId::free_packet) {
      add("equivariance_ks", ks, "<", 0.025);
    } else {
      add("equivariance_ks", ks, "<", ks_critical_99(valid));
    }
    if (c_.scenario == ScenarioId::harmonic_ground) {
      add("stationary_max_trajectory_drift", max_drift(ens), "<", 1e-12);
    }
    if (c_.scenario == ScenarioId::double_well) {
      add("trajectory_ordering_preserved", preserves_ordering(ens) ? 1.0 : 0.0, ">=", 1.0);
    }
    if (csv()) {
      write_trajectories_csv(dir_ / "trajectories.csv", ens.times, ens.positions, {},
                             c_.output.max_exported_paths);
      artifact("trajectories.csv");
    }
  }

  void wigner_checks(const PhysicalConstants& k) {
    const auto& wc = c_.wigner;
    const Grid grid(wc.n, wc.length, -0.5 * wc.length);
    const Potential u = make_potential(c_.potential, grid, k.mass);
    const WaveField psi0 = init_state(make_state(c_, wc.dt), grid, k);
    const auto n_steps = static_cast<std::size_t>(std::llround(wc.t_final / wc.dt));

    const WignerField w0 = wigner_transform(psi0);
    const Marginals m = marginals(w0);
    double marginal_err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      marginal_err = std::max(marginal_err, std::abs(m.rho_x.values[i] - std::norm(psi0.psi.values[i])));
    }
    add("wigner_position_marginal", marginal_err, "<", 1e-10);

    WaveField psi = psi0;
    SplitStepPropagator(u, k, wc.dt).advance(psi, n_steps);
    const WignerField reference = wigner_transform(psi);
    double ref_scale = 0.0;
    for (double v : reference.values) ref_scale = std::max(ref_scale, std::abs(v));

    auto evolve = [&](int k_max) {
      WignerField w = w0;
      MoyalPropagator(w.grid, u, k, wc.dt, k_max).advance(w, n_steps);
      return w;
    };
    auto gap = [&](const WignerField& a, const WignerField& b) {
      double d = 0.0;
      for (std::size_t j = 0; j < a.values.size(); ++j) d = std::max(d, std::abs(a.values[j] - b.values[j]));
      return d / ref_scale;
    };

    const WignerField evolved = evolve(wc.k_max);
    const double err = gap(evolved, reference);
    add("wigner_moyal_vs_schrodinger", err, "<", 1e-3);

    if (u.derivatives_vanish_from(3)) {
      add("wigner_classical_limit_gap", gap(evolve(0), evolve(2)), "<", 1e-12);
    } else if (wc.k_max >= 1) {
      const double err0 = gap(evolve(0), reference);
      metric("wigner_truncated_error", err0);
      add("wigner_truncation_contrast", err0 / err, ">=", 10.0);
    }

    const std::vector<double> fq = quantum_force_term(w0, u, kMaxSeriesOrder);
    double worst = 0.0;
    const std::size_t np = w0.grid.p.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < np; ++j) acc += fq[i * np + j];
      worst = std::max(worst, std::abs(acc * w0.grid.p.spacing()));
    }
    add("quantum_force_p_integral", worst, "<", 1e-10);

    const NegativityDiagnostics neg0 = negativity(w0);
    const NegativityDiagnostics neg1 = negativity(evolved);
    metric("wigner_min_initial", neg0.min_value);
    metric("wigner_min_final", neg1.min_value);
    metric("wigner_negative_volume_final", neg1.negative_volume);

    if (csv()) {
      const std::vector<WignerField> out{w0, evolved};
      write_wigner_csv(dir_ / "wigner.csv", out);
      artifact("wigner.csv");
    }
  }

  // --- two-particle scenarios -------------------------------------------------

  void pair_scenario() {
    const PhysicalConstants k = constants_of(c_);
    const Grid axis(c_.grid.n, c_.grid.length, c_.grid.origin);
    const Grid2D grid{axis, axis};
    const Potential u = make_potential(c_.potential, axis, k.mass);
    const double floor = c_.madelung.rho_floor;
    PairStateSpec spec;
    if (c_.state.kind == "product") {
      spec = ProductState{{c_.state.x0, c_.state.p0, c_.state.sigma},
                          {-c_.state.x0, -c_.state.p0, c_.state.sigma}};
    } else {
      spec = SymmetrizedPairState{c_.state.separation, c_.state.sigma};
    }
    WaveField2D psi = init_state(spec, grid, k);
    auto norm_of = [](const WaveField2D& w) {
      RealField2D rho(w.grid());
      for (std::size_t j = 0; j < rho.values.size(); ++j) rho.values[j] = std::norm(w.psi.values[j]);
      return integrate(rho);
    };
    const double norm0 = norm_of(psi);
    const MadelungFields2D f0 = decompose(psi, floor);
    const auto n_steps = static_cast<std::size_t>(std::llround(c_.time.t_final / c_.time.dt));
    SplitStepPropagator2D(u, grid, k, c_.time.dt).advance(psi, n_steps);
    psi.time = c_.time.t_final;
    const MadelungFields2D f1 = decompose(psi, floor);

    add("norm_drift", std::abs(norm_of(psi) - norm0), "<", 1e-9);
    const double sep0 = q_separability(f0);
    const double sep1 = q_separability(f1);
    metric("q_mixed_derivative_initial", sep0);
    metric("q_mixed_derivative_final", sep1);
    if (c_.state.kind == "product") {
      add("q_mixed_derivative_initial", sep0, "<", 1e-6);
      add("q_mixed_derivative_final", sep1, "<", 1e-6);
      add("q_additivity", additivity_gap(f0, k, floor), "<", 1e-8);
    } else {
      add("q_mixed_derivative_initial", sep0, ">", 0.01);
      add("q_mixed_derivative_final", sep1, ">", 0.01);
    }
    if (csv()) {
      const std::vector<double> times{0.0, c_.time.t_final};
      const std::vector<MadelungFields2D> frames{f0, f1};
      write_pair_fields_csv(dir_ / "pair_fields.csv", times, frames);
      artifact("pair_fields.csv");
    }
  }

  // max |Q(x1, x2) - Q1(x1) - Q2(x2)| over the 2D mask, Q_i from the marginals.
  static double additivity_gap(const MadelungFields2D& f, const PhysicalConstants& k, double floor) {
    const Grid2D& g = f.rho.grid;
    RealField r1(g.axis1);
    RealField r2(g.axis2);
    for (std::size_t i = 0; i < g.axis1.size(); ++i) {
      for (std::size_t j = 0; j < g.axis2.size(); ++j) {
        const double v = f.rho.values[g.index(i, j)];
        r1.values[i] += v * g.axis2.spacing();
        r2.values[j] += v * g.axis1.spacing();
      }
    }
    const RealField q1 = quantum_potential(r1, k, floor);
    const RealField q2 = quantum_potential(r2, k, floor);
    const Mask m1 = density_mask(r1.values, floor);
    const Mask m2 = density_mask(r2.values, floor);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.axis1.size(); ++i) {
      for (std::size_t j = 0; j < g.axis2.size(); ++j) {
        const std::size_t idx = g.index(i, j);
        if (!(f.mask[idx] && m1[i] && m2[j])) continue;
        worst = std::max(worst, std::abs(f.Q.values[idx] - q1.values[i] - q2.values[j]));
      }
    }
    return worst;
  }

  // --- Brownian scenarios -----------------------------------------------------

  LangevinParams langevin_params() const {
    const auto& b = c_.brownian;
    LangevinParams p;
    p.mass = c_.constants.mass;
    p.friction = b.friction;
    p.temperature = b.temperature;
    p.dt = b.dt;
    p.t_final = b.t_final;
    p.n_paths = b.n_paths;
    p.seed = b.seed;
    p.record_stride = b.record_stride;
    return p;
  }

  InitialConditions initial_conditions(bool thermal_velocities) const {
    const auto& b = c_.brownian;
    const double m = c_.constants.mass;
    InitialConditions ic;
    if (b.thermal_start) {
      const double omega = c_.potential.omega;
      ic.positions = gaussian_draws(b.n_paths, 0.0, std::sqrt(b.temperature / (m * omega * omega)), b.seed, 0);
    } else {
      ic.positions.assign(b.n_paths, b.x0);
    }
    if (thermal_velocities && b.thermal_start) {
      ic.velocities = gaussian_draws(b.n_paths, 0.0, std::sqrt(b.temperature / m), b.seed, 1);
    } else {
      ic.velocities.assign(b.n_paths, 0.0);
    }
    return ic;
  }

  std::vector<std::size_t> stat_lags(const BrownianEnsemble& e, double max_lag_time) const {
    const double spacing = e.times[1] - e.times[0];
    const auto max_lag = static_cast<std::size_t>(std::llround(max_lag_time / spacing));
    std::vector<std::size_t> lags;
    for (std::size_t l = 0; l <= max_lag; ++l) lags.push_back(l);
    return lags;
  }

  static ordered_json curves(const TrajectoryStats& s) {
    return {{"lag_time", s.lag_times}, {"msd", s.msd}, {"vacf", s.vacf}};
  }

  std::size_t stationary_index(const BrownianEnsemble& e) const {
    const double spacing = e.times[1] - e.times[0];
    return static_cast<std::size_t>(std::llround(c_.brownian.stationary_from / spacing));
  }

  void brownian_scenario() {
    const PhysicalConstants k = constants_of(c_);
    const Grid grid(c_.grid.n, c_.grid.length, c_.grid.origin);
    const Potential u = make_potential(c_.potential, grid, k.mass);
    const LangevinParams params = langevin_params();
    const BrownianEnsemble e = langevin_evolve(u, params, initial_conditions(true));
    const std::size_t last = e.n_times() - 1;
    const double t_end = e.times[last];
    const double kt = params.temperature;
    const double crit = ks_critical_99(params.n_paths);

    const double ks_end = boltzmann_distance(e, u, t_end);
    const double ks_start = boltzmann_distance(e, u, 0.0);
    metric("ks_critical_99", crit);
    if (c_.scenario == ScenarioId::brownian_harmonic) {
      const double omega = c_.potential.omega;
      const EmpiricalSample xs{e.positions_at(last), {}};
      const EmpiricalSample vs{e.velocities_at(last), {}};
      const double var_x = kt / (k.mass * omega * omega);
      const double var_v = kt / k.mass;
      metric("var_x", xs.variance());
      metric("var_v", vs.variance());
      add("equipartition_position", std::abs(xs.variance() / var_x - 1.0), "<", 0.05);
      add("equipartition_velocity", std::abs(vs.variance() / var_v - 1.0), "<", 0.05);
      add("boltzmann_ks", ks_end, "<", crit);
    } else {
      add("boltzmann_ks", ks_end, "<", 2.0 * crit);
    }
    if (!c_.brownian.thermal_start) add("boltzmann_ks_initial", ks_start, ">", 0.3);

    // KDE force balance on growing subsets of the final ensemble.
    std::vector<double> sizes;
    std::vector<double> residuals;
    const std::vector<double> final_x = e.positions_at(last);
    for (std::size_t n = final_x.size(); n >= 100 && sizes.size() < 3; n /= 4) {
      EmpiricalSample s{std::vector<double>(final_x.begin(), final_x.begin() + static_cast<std::ptrdiff_t>(n)), {}};
      sizes.insert(sizes.begin(), static_cast<double>(n));
      residuals.insert(residuals.begin(), thermal_balance_residual(s, u, kt));
    }
    metric("thermal_balance", {{"n_paths", sizes}, {"residual", residuals}});
    if (residuals.size() >= 2) {
      add("thermal_balance_decreases", residuals.back() / residuals.front(), "<", 1.0);
    }

    const std::size_t start = stationary_index(e);
    const TrajectoryStats stats = trajectory_stats(e, stat_lags(e, 3.0 * k.mass / params.friction), start);
    metric("langevin_curves", curves(stats));

    if (csv()) {
      write_trajectories_csv(dir_ / "trajectories.csv", e.times, e.positions, e.velocities,
                             c_.output.max_exported_paths);
      artifact("trajectories.csv");
    }
  }

  void meanfield_scenario() {
    const PhysicalConstants k = constants_of(c_);
    const Grid grid(c_.grid.n, c_.grid.length, c_.grid.origin);
    const Potential u = make_potential(c_.potential, grid, k.mass);
    const LangevinParams params = langevin_params();
    const double crit = ks_critical_99(params.n_paths);
    const double omega = c_.potential.omega;
    metric("ks_critical_99", crit);

    const BrownianEnsemble lang = langevin_evolve(u, params, initial_conditions(true));
    const std::size_t last = lang.n_times() - 1;
    const double t_end = lang.times[last];
    const EmpiricalSample xs{lang.positions_at(last), {}};
    const double var_x = params.temperature / (k.mass * omega * omega);
    add("langevin_equipartition_position", std::abs(xs.variance() / var_x - 1.0), "<", 0.05);
    add("langevin_boltzmann_ks", boltzmann_distance(lang, u, t_end), "<", crit);

    const double lag_time = k.mass / params.friction;
    const double spacing = lang.times[1] - lang.times[0];
    const std::size_t lag = static_cast<std::size_t>(std::llround(lag_time / spacing));
    const std::size_t start = stationary_index(lang);
    const TrajectoryStats ls = trajectory_stats(lang, stat_lags(lang, 3.0 * lag_time), start);
    metric("langevin_curves", curves(ls));
    const double lang_msd = ls.msd[lag];
    metric("langevin_msd_at_lag", lang_msd);

    const InitialConditions mf_init = initial_conditions(false);
    BrownianEnsemble nominal;
    for (double factor : {0.5, 1.0, 2.0}) {
      BandwidthRule rule{factor * c_.brownian.bandwidth_factor, std::nullopt};
      BrownianEnsemble mf = meanfield_evolve(u, params, mf_init, rule);
      const TrajectoryStats ms = trajectory_stats(mf, stat_lags(mf, 3.0 * lag_time), start);
      const std::string tag = format_double(factor);
      add("msd_ratio_bandwidth_x" + tag, ms.msd[lag] / lang_msd, "<", 0.2);
      if (factor == 1.0) {
        double ks_max = 0.0;
        for (double t : mf.times) ks_max = std::max(ks_max, boltzmann_distance(mf, u, t));
        add("meanfield_boltzmann_ks_max", ks_max, "<", 0.05);
        add("meanfield_boltzmann_ks", boltzmann_distance(mf, u, t_end), "<", crit);
        metric("meanfield_curves", curves(ms));
        metric("meanfield_msd_at_lag", ms.msd[lag]);
        nominal = std::move(mf);
      }
    }

    // Noise-free limit: both integrators reduce to damped Newtonian motion.
    LangevinParams cold = params;
    cold.temperature = 0.0;
    cold.n_paths = kMinMeanFieldPaths;
    cold.t_final = std::min(params.t_final, 5.0);
    cold.record_stride = 1;
    InitialConditions ci{gaussian_draws(cold.n_paths, 0.0, 1.0, params.seed, 2),
                         gaussian_draws(cold.n_paths, 0.0, 1.0, params.seed, 3)};
    const BrownianEnsemble a = langevin_evolve(u, cold, ci);
    const BrownianEnsemble b = meanfield_evolve(u, cold, ci);
    double dev = 0.0;
    for (std::size_t j = 0; j < a.positions.size(); ++j) dev = std::max(dev, std::abs(a.positions[j] - b.positions[j]));
    add("zero_temperature_pathwise_gap", dev, "<", 1e-6);

    if (csv()) {
      write_trajectories_csv(dir_ / "trajectories.csv", lang.times, lang.positions, lang.velocities,
                             c_.output.max_exported_paths);
      artifact("trajectories.csv");
      write_trajectories_csv(dir_ / "meanfield_trajectories.csv", nominal.times, nominal.positions,
                             nominal.velocities, c_.output.max_exported_paths);
      artifact("meanfield_trajectories.csv");
    }
  }

  const ScenarioConfig& c_;
  RunOptions options_;
  fs::path dir_;
  RunReport report_;
};

}  // namespace

RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  validate(config);
  try {
    return Runner(config, options).run();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(to_string(config.scenario) + ": " + e.what());
  }
}

}  // namespace qhydro
