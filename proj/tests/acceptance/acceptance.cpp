// Acceptance suite: one PASS/FAIL line per acceptance criterion.
//
// usage: qhydro_acceptance [--work-dir DIR] [--results FILE] [criterion ids...]
//
// Exit status is 0 when every failing criterion is listed in kKnownUnattainable
// and 1 otherwise.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "qhydro/analysis.hpp"
#include "qhydro/bohm.hpp"
#include "qhydro/brownian.hpp"
#include "qhydro/madelung.hpp"
#include "qhydro/scenario.hpp"
#include "qhydro/schrodinger.hpp"
#include "qhydro/wigner.hpp"

using namespace qhydro;
namespace fs = std::filesystem;

namespace {

// A frozen N(0,1) ensemble against the N(0,1.25) density of the spread packet
// has KS = Phi(x*) - Phi(x*/sqrt(1.25)) at x*^2 = 1.25 ln(1.25) / 0.25,
// i.e. 0.0270: below the 0.05 detection threshold for any sample size. See
// README, "Known unattainable criterion".
const std::set<std::string> kKnownUnattainable = {"5b"};

class Report {
 public:
  explicit Report(std::FILE* copy) : copy_(copy) {}

  void add(std::string id, std::string name, bool passed, std::string detail) {
    checks_.push_back({id, name, passed, detail});
    const char* note = (!passed && kKnownUnattainable.count(id)) ? "  [known unattainable]" : "";
    for (std::FILE* out : {stdout, copy_}) {
      if (!out) continue;
      std::fprintf(out, "%s %-3s %-34s %s%s\n", passed ? "PASS" : "FAIL", id.c_str(), name.c_str(),
                   detail.c_str(), note);
      std::fflush(out);
    }
  }

  int exit_code() const {
    int unexpected = 0;
    for (const auto& c : checks_)
      if (!c.passed && !kKnownUnattainable.count(c.id)) ++unexpected;
    for (std::FILE* out : {stdout, copy_})
      if (out) std::fprintf(out, "\n%zu checks, %d unexpected failure(s)\n", checks_.size(), unexpected);
    return unexpected == 0 ? 0 : 1;
  }

 private:
  struct Entry {
    std::string id;
    std::string name;
    bool passed;
    std::string detail;
  };
  std::vector<Entry> checks_;
  std::FILE* copy_;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

const Grid kGrid(512, 40.0, -20.0);

struct Snapshots {
  MadelungFields before, now, after;
};

// Three consecutive states ending at t_end, propagated at dt.
Snapshots snapshots_at(const WaveField& initial, const Potential& U, double dt, double t_end,
                       double rho_floor) {
  WaveField s = initial;
  SplitStepPropagator prop(U, s.constants, dt, StepOptions{1.0});
  prop.advance(s, static_cast<std::size_t>(std::lround(t_end / dt)) - 2);
  auto a = decompose(s, rho_floor);
  prop.advance(s);
  auto b = decompose(s, rho_floor);
  prop.advance(s);
  auto c = decompose(s, rho_floor);
  return {std::move(a), std::move(b), std::move(c)};
}

// --- 1 ----------------------------------------------------------------------

void unitarity_and_energy(Report& r) {
  struct Case {
    const char* label;
    Potential U;
    StateSpec state;
  };
  std::vector<Case> cases{
      {"free", Potential::free(kGrid), GaussianState{0.0, 0.0, 1.0}},
      {"harmonic_ground", Potential::harmonic(kGrid, 1.0, 1.0), HarmonicEigenstate{1.0, 0}},
      {"harmonic_coherent", Potential::harmonic(kGrid, 1.0, 1.0),
       GaussianState{2.0, 0.0, std::sqrt(0.5)}},
  };
  double worst_norm = 0.0, worst_energy = 0.0;
  std::string detail;
  for (auto& c : cases) {
    auto s = init_state(c.state, kGrid, {});
    auto o0 = observables(s, c.U);
    SplitStepPropagator(c.U, s.constants, 1e-3).advance(s, 10000);
    auto o1 = observables(s, c.U);
    double dn = std::abs(o1.norm - o0.norm);
    double de = std::abs(o1.energy - o0.energy) / std::abs(o0.energy);
    worst_norm = std::max(worst_norm, dn);
    worst_energy = std::max(worst_energy, de);
    detail += fmt("%s: dN=%.1e dE/E=%.1e; ", c.label, dn, de);
  }
  r.add("1", "unitarity_energy", worst_norm < 1e-9 && worst_energy < 1e-7,
        detail + "limits 1e-9, 1e-7");
}

// --- 2 ----------------------------------------------------------------------

void spreading_law(Report& r) {
  auto U = Potential::free(kGrid);
  auto s = init_state(GaussianState{0.0, 0.0, 1.0}, kGrid, {});
  SplitStepPropagator(U, s.constants, 1e-3).advance(s, 1000);
  double var = observables(s, U).var_x;
  r.add("2", "free_spreading_var_x", std::abs(var - 1.25) < 1e-6,
        fmt("var_x(1)=%.12f expected 1.25, |err|=%.1e < 1e-6", var, std::abs(var - 1.25)));
}

// --- 3 ----------------------------------------------------------------------

void quantum_potential_values(Report& r) {
  auto f = decompose(init_state(GaussianState{0.0, 0.0, 1.0}, kGrid, {}));
  double q0 = interpolate(f.Q, 0.0);
  auto fq = mean_q_vs_fisher(f.rho, {});
  bool ok = std::abs(q0 - 0.25) < 1e-6 && std::abs(fq.mean_q - 0.125) < 1e-6 &&
            std::abs(fq.mean_q - fq.fisher_scaled) < 1e-6;
  r.add("3", "quantum_potential_fisher", ok,
        fmt("Q(0)=%.10f <Q>=%.10f fisher=%.10f (tol 1e-6)", q0, fq.mean_q, fq.fisher_scaled));
}

// --- 4 ----------------------------------------------------------------------

void hydrodynamic_identities(Report& r) {
  // The residual floor of 1e-4 keeps the centered time difference above the
  // rounding floor of the far tails, which grows as 1/dt.
  const double floor = 1e-4;
  const double t_end = 1.0;
  auto U = Potential::free(kGrid);
  auto s0 = init_state(GaussianState{0.0, 0.0, 1.0}, kGrid, {});
  std::vector<double> steps{4e-3, 2e-3, 1e-3}, cont, force;
  for (double dt : steps) {
    auto snap = snapshots_at(s0, U, dt, t_end, floor);
    cont.push_back(continuity_residual(snap.before, snap.now, snap.after, dt).normalized);
    force.push_back(force_balance_residual(snap.before, snap.now, snap.after, U, dt).normalized);
  }
  double oc = convergence_order(cont, steps);
  double of = convergence_order(force, steps);
  // Orders are measured values; 2.0 +- 0.1 is the refinement-study convention.
  bool ok = oc >= 1.9 && of >= 1.9 && cont.back() < 5e-3 && force.back() < 5e-3;
  r.add("4", "hydrodynamic_residual_convergence", ok,
        fmt("continuity %.2e/%.2e/%.2e order %.3f; force balance %.2e/%.2e/%.2e order %.3f; "
            "floor %.0e",
            cont[0], cont[1], cont[2], oc, force[0], force[1], force[2], of, floor));
}

// --- 5, 6 -------------------------------------------------------------------

void equivariance(Report& r) {
  auto U = Potential::free(kGrid);
  auto s0 = init_state(GaussianState{0.0, 0.0, 1.0}, kGrid, {});
  auto tape = record_tape(s0, U, 1e-3, 10, 101);
  const std::size_t n = 10000;
  auto x0 = sample_initial(tape.frame(0).rho, n, 1);
  auto ens = integrate_guidance(tape, x0, 1e-3, 1);
  double ks = equivariance_distance(ens, tape, 1.0);
  r.add("5a", "equivariance_ks", ks < 0.025 && ens.flagged_count() == 0,
        fmt("KS(t=1)=%.4f < 0.025 (99%% critical %.4f), n=%zu, flagged %zu", ks,
            ks_critical_99(n), n, ens.flagged_count()));

  // Control: every path frozen at its t = 0 position.
  EmpiricalSample frozen{ens.positions_at(0), {}};
  const auto& last = tape.frame(tape.frame_index(1.0));
  PiecewiseLinearCdf rho_t(last.rho);
  double ks_frozen = ks_distance(frozen, [&](double x) { return rho_t(x) / rho_t.total_mass(); });
  const double x_star = std::sqrt(1.25 * std::log(1.25) / 0.25);
  auto phi = [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); };
  const double analytic = phi(x_star) - phi(x_star / std::sqrt(1.25));
  r.add("5b", "corrupted_ensemble_detected", ks_frozen > 0.05,
        fmt("KS(frozen)=%.4f > 0.05 required; population value %.4f", ks_frozen, analytic));
}

void guidance_newton_consistency(Report& r) {
  auto U = Potential::free(kGrid);
  auto s0 = init_state(GaussianState{0.0, 0.0, 1.0}, kGrid, {});
  // One frame per 1e-3: the integrator steps span whole frames, so no
  // time-interpolation error enters the comparison.
  auto tape = record_tape(s0, U, 1e-3, 1, 1001);
  auto x0 = sample_initial(tape.frame(0).rho, 500, 2);
  std::vector<double> steps{8e-3, 4e-3, 2e-3}, dev;
  for (double dt : steps) {
    auto g = integrate_guidance(tape, x0, dt);
    auto n = integrate_newtonian(tape, x0, dt);
    dev.push_back(max_path_deviation(g, n));
  }
  double order = convergence_order(dev, steps);
  r.add("6a", "guidance_newton_order", order >= 1.9,
        fmt("max deviation %.3e/%.3e/%.3e at dt 8e-3/4e-3/2e-3, order %.3f >= 2 (-0.1)", dev[0],
            dev[1], dev[2], order));

  auto coarse = record_tape(s0, U, 1e-3, 10, 101);
  auto g = integrate_guidance(coarse, x0, 1e-3);
  auto off = integrate_newtonian(coarse, x0, 1e-3, 1.0);
  double d = max_path_deviation(g, off);
  r.add("6b", "velocity_offset_diverges", d > 0.1, fmt("max deviation by t=1 %.4f > 0.1", d));
}

// --- 7 ----------------------------------------------------------------------

void stationary_eigenstate(Report& r) {
  const double dt = 1e-4;
  auto U = Potential::harmonic(kGrid, 1.0, 1.0);
  auto s = init_state(HarmonicEigenstate{1.0, 0, 0.0, dt}, kGrid, {});
  auto tape = record_tape(s, U, dt, 100, 101);
  auto x0 = sample_initial(tape.frame(0).rho, 1000, 3);
  auto ens = integrate_guidance(tape, x0, dt);
  double drift = max_drift(ens);
  double force_discrete = total_force_magnitude(decompose(s), U);
  double force_analytic =
      total_force_magnitude(decompose(init_state(HarmonicEigenstate{1.0, 0}, kGrid, {})), U);
  double force = std::max(force_discrete, force_analytic);
  r.add("7", "stationary_ground_state", drift < 1e-12 && force < 1e-6,
        fmt("max drift over t in [0,1] %.2e < 1e-12; max|d(U+Q)/dx| %.2e < 1e-6 "
            "(analytic state %.2e)",
            drift, force_discrete, force_analytic));
}

// --- 8 ----------------------------------------------------------------------

void wigner_crosschecks(Report& r) {
  Grid g(128, 24.0, -12.0);
  PhysicalConstants c;

  auto coherent = wigner_transform(init_state(GaussianState{2.0, 0.0, std::sqrt(0.5)}, g, c));
  auto harmonic = Potential::harmonic(g, 1.0, 1.0);
  auto a = coherent, b = coherent;
  MoyalPropagator(a.grid, harmonic, c, 1e-3, 0).advance(a, 1000);
  MoyalPropagator(b.grid, harmonic, c, 1e-3, 2).advance(b, 1000);
  double gap = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    gap = std::max(gap, std::abs(a.values[i] - b.values[i]));
  r.add("8a", "classical_limit_quadratic", gap < 1e-12,
        fmt("max|W(k_max=0) - W(k_max=2)| at t=1 = %.1e < 1e-12", gap));

  auto packet = init_state(GaussianState{1.0, 0.0, 1.0}, g, c);
  auto quartic = Potential::quartic(g, 0.1);
  double e1 = crosscheck(packet, quartic, 0.5, 1e-3, 1);
  double e0 = crosscheck(packet, quartic, 0.5, 1e-3, 0);
  r.add("8b", "moyal_vs_schrodinger_quartic", e1 < 1e-3 && e0 >= 10.0 * e1,
        fmt("error k_max=1 %.2e < 1e-3; k_max=0 %.2e (ratio %.0f >= 10)", e1, e0, e0 / e1));

  auto w = wigner_transform(packet);
  double worst = 0.0;
  for (auto U : {quartic, Potential::double_well(g, 1.0, 1.0)}) {
    auto q = quantum_force_term(w, U, 2);
    const std::size_t np = w.grid.p.size();
    for (std::size_t i = 0; i < w.grid.x.size(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < np; ++j) sum += q[i * np + j];
      worst = std::max(worst, std::abs(sum) * w.grid.p.spacing());
    }
  }
  r.add("8c", "quantum_force_zero_mean", worst < 1e-10,
        fmt("max_x |int quantum term dp| = %.1e < 1e-10", worst));
}

// --- 9 ----------------------------------------------------------------------

void two_particle_nonlocality(Report& r) {
  Grid axis(256, 40.0, -20.0);
  Grid2D g{axis, axis};
  double product = q_separability(decompose(init_state(ProductState{}, g, {})));
  double entangled = q_separability(decompose(init_state(SymmetrizedPairState{2.0, 1.0}, g, {})));
  r.add("9", "two_particle_nonlocality", product < 1e-6 && entangled > 0.01,
        fmt("product %.2e < 1e-6; entangled %.6f > 0.01", product, entangled));
}

// --- 10 ---------------------------------------------------------------------

void brownian_analogy(Report& r) {
  Grid g(256, 40.0, -20.0);
  auto U = Potential::harmonic(g, 1.0, 1.0);
  const std::size_t n = 10000;

  LangevinParams p;
  p.dt = 0.01;
  p.t_final = 50.0;
  p.n_paths = n;
  p.seed = 1;
  p.record_stride = 10;
  auto delta = langevin_evolve(U, p, {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)});
  EmpiricalSample final_x{delta.positions_at(delta.n_times() - 1), {}};
  double var = final_x.variance();
  double ks_langevin = boltzmann_distance(delta, U, p.t_final);

  p.t_final = 20.0;
  // Both start from Boltzmann positions; mean-field paths start at rest, the
  // stationary hydrodynamic velocity, Langevin paths with thermal velocities.
  auto x_eq = gaussian_draws(n, 0.0, 1.0, 2, 1);
  auto mf = meanfield_evolve(U, p, {x_eq, std::vector<double>(n, 0.0)});
  auto lv = langevin_evolve(U, p, {x_eq, gaussian_draws(n, 0.0, 1.0, 2, 2)});
  double ks_mf_max = 0.0;
  for (double t : mf.times) ks_mf_max = std::max(ks_mf_max, boltzmann_distance(mf, U, t));
  double ks_mf = boltzmann_distance(mf, U, p.t_final);

  std::vector<std::size_t> lag{10};  // m / b = 1 at stride 0.1
  std::size_t start = mf.time_index(10.0);
  double msd_mf = trajectory_stats(mf, lag, start).msd[0];
  double msd_lv = trajectory_stats(lv, lag, start).msd[0];

  const double crit = ks_critical_99(n);
  r.add("10a", "langevin_equipartition", std::abs(var - 1.0) < 0.05,
        fmt("Var(x)=%.4f, kT/(m w^2)=1 +- 5%%", var));
  r.add("10b", "boltzmann_ks_langevin_and_meanfield", ks_langevin < crit && ks_mf < crit,
        fmt("Langevin %.4f, mean-field %.4f < %.4f (max over t in [0,20] %.4f)", ks_langevin,
            ks_mf, crit, ks_mf_max));
  r.add("10c", "meanfield_msd_gap", msd_mf < 0.2 * msd_lv,
        fmt("MSD(lag m/b) mean-field %.3e vs Langevin %.3e, ratio %.2e < 0.2", msd_mf, msd_lv,
            msd_mf / msd_lv));
}

// --- 11 ---------------------------------------------------------------------

void determinism(Report& r, const fs::path& work_dir) {
  std::size_t files = 0, mismatched = 0;
  std::string mismatch;
  for (ScenarioId id : all_scenarios()) {
    std::vector<std::vector<ArtifactEntry>> runs;
    for (int threads : {1, 4}) {
      omp_set_num_threads(threads);
      auto config = default_config(id);
      config.output.directory = (work_dir / (to_string(id) + "_t" + std::to_string(threads))).string();
      fs::remove_all(config.output.directory);
      runs.push_back(run_scenario(config).artifacts);
    }
    omp_set_num_threads(omp_get_num_procs());
    for (const auto& a : runs[0]) {
      if (!a.file.ends_with(".csv")) continue;
      ++files;
      auto it = std::find_if(runs[1].begin(), runs[1].end(),
                             [&](const ArtifactEntry& b) { return b.file == a.file; });
      if (it == runs[1].end() || it->sha256 != a.sha256) {
        ++mismatched;
        mismatch += " " + to_string(id) + "/" + a.file;
      }
    }
  }
  r.add("11", "bitwise_determinism", mismatched == 0 && files > 0,
        fmt("%zu CSV artifacts across %zu scenarios, 1 vs 4 threads, %zu differ%s", files,
            all_scenarios().size(), mismatched, mismatch.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work_dir = fs::temp_directory_path() / "qhydro_acceptance";
  fs::path results;
  std::set<std::string> selected;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--work-dir" && i + 1 < argc) {
      work_dir = argv[++i];
    } else if (arg == "--results" && i + 1 < argc) {
      results = argv[++i];
    } else {
      selected.insert(arg);
    }
  }
  fs::create_directories(work_dir);

  const std::vector<std::pair<std::string, std::function<void(Report&)>>> criteria{
      {"1", unitarity_and_energy},
      {"2", spreading_law},
      {"3", quantum_potential_values},
      {"4", hydrodynamic_identities},
      {"5", equivariance},
      {"6", guidance_newton_consistency},
      {"7", stationary_eigenstate},
      {"8", wigner_crosschecks},
      {"9", two_particle_nonlocality},
      {"10", brownian_analogy},
      {"11", [&](Report& r) { determinism(r, work_dir); }},
  };

  std::FILE* copy = results.empty() ? nullptr : std::fopen(results.c_str(), "w");
  Report report(copy);
  for (const auto& [id, run] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    try {
      run(report);
    } catch (const std::exception& e) {
      report.add(id, "error", false, e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("     (criterion %s: %.1f s)\n", id.c_str(), secs);
  }
  int code = report.exit_code();
  if (copy) std::fclose(copy);
  return code;
}
