#include "qhydro/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qhydro/rng.hpp"

namespace qhydro {
namespace {

// Initial-condition draws live far above any step index.
constexpr std::uint64_t kInitialIndexBase = std::uint64_t{1} << 62;

void check_initial(const InitialConditions& initial, std::size_t n_paths) {
  if (initial.positions.size() != n_paths || initial.velocities.size() != n_paths) {
    throw DomainError("brownian: initial conditions must hold n_paths positions and velocities");
  }
  ensure_finite(initial.positions, "initial positions");
  ensure_finite(initial.velocities, "initial velocities");
}

void check_dt(const Potential& potential, const LangevinParams& params) {
  const double limit = max_stable_dt(potential, params);
  if (params.dt > limit) {
    throw DomainError("brownian: dt = " + std::to_string(params.dt) + " exceeds stable limit " +
                      std::to_string(limit));
  }
}

BrownianEnsemble allocate(const LangevinParams& params) {
  BrownianEnsemble e;
  e.params = params;
  const std::size_t steps = params.n_steps();
  for (std::size_t s = 0; s <= steps; s += params.record_stride) {
    e.times.push_back(static_cast<double>(s) * params.dt);
  }
  e.positions.resize(params.n_paths * e.times.size());
  e.velocities.resize(params.n_paths * e.times.size());
  return e;
}

// One semi-implicit step; `kick` is the non-conservative impulse (noise or
// mean-field force times dt).
inline void advance(double& x, double& v, double force, double kick, const LangevinParams& p) {
  const double m = p.mass;
  double mom = m * v;
  mom += (force - p.friction * v) * p.dt + kick;
  v = mom / m;
  x += v * p.dt;
}

}  // namespace

void LangevinParams::validate() const {
  if (!(mass > 0.0)) throw DomainError("langevin: mass must be positive");
  if (!(friction > 0.0)) throw DomainError("langevin: friction must be positive");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw DomainError("langevin: temperature must be non-negative");
  }
  if (!(dt > 0.0)) throw DomainError("langevin: dt must be positive");
  if (!(t_final >= 0.0)) throw DomainError("langevin: t_final must be non-negative");
  if (n_paths == 0) throw DomainError("langevin: n_paths must be positive");
  if (record_stride == 0) throw DomainError("langevin: record_stride must be positive");
  const double steps = std::round(t_final / dt);
  if (std::abs(steps * dt - t_final) > 1e-9 * std::max(1.0, t_final)) {
    throw DomainError("langevin: dt must divide t_final");
  }
}

std::size_t LangevinParams::n_steps() const {
  return static_cast<std::size_t>(std::round(t_final / dt));
}

std::vector<double> gaussian_draws(std::size_t n, double mean, double std_dev, std::uint64_t seed,
                                   std::uint64_t salt) {
  const CounterRng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = mean + std_dev * rng.normal(i, kInitialIndexBase + salt);
  }
  return out;
}

std::vector<double> BrownianEnsemble::positions_at(std::size_t k) const {
  std::vector<double> out(n_paths());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = position(p, k);
  return out;
}

std::vector<double> BrownianEnsemble::velocities_at(std::size_t k) const {
  std::vector<double> out(n_paths());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = velocity(p, k);
  return out;
}

std::size_t BrownianEnsemble::time_index(double t) const {
  const double spacing = times.size() > 1 ? times[1] - times[0] : 1.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - t) <= 1e-9 * spacing) return k;
  }
  throw DomainError("brownian: time " + std::to_string(t) + " is not a stored sample");
}

double max_stable_dt(const Potential& potential, const LangevinParams& params) {
  double limit = params.mass / params.friction;
  const double omega = potential.characteristic_frequency(params.mass);
  if (omega > 0.0) limit = std::min(limit, 2.0 * std::numbers::pi / omega);
  return 0.1 * limit;
}

BrownianEnsemble langevin_evolve(const Potential& potential, const LangevinParams& params,
                                 const InitialConditions& initial) {
  params.validate();
  check_initial(initial, params.n_paths);
  check_dt(potential, params);
  BrownianEnsemble e = allocate(params);
  const CounterRng rng(params.seed);
  const std::size_t steps = params.n_steps();
  const std::size_t nt = e.n_times();
  const double amplitude = std::sqrt(2.0 * params.friction * params.temperature * params.dt);
  const bool noisy = params.temperature > 0.0;
  const auto n = static_cast<std::ptrdiff_t>(params.n_paths);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pi = 0; pi < n; ++pi) {
    const auto path = static_cast<std::size_t>(pi);
    double x = initial.positions[path];
    double v = initial.velocities[path];
    e.positions[path * nt] = x;
    e.velocities[path * nt] = v;
    for (std::size_t s = 0; s < steps; ++s) {
      const double kick = noisy ? amplitude * rng.normal(path, s) : 0.0;
      advance(x, v, -potential.derivative_at(x, 1), kick, params);
      if ((s + 1) % params.record_stride == 0) {
        const std::size_t k = (s + 1) / params.record_stride;
        e.positions[path * nt + k] = x;
        e.velocities[path * nt + k] = v;
      }
    }
  }
  ensure_finite(e.positions, "langevin positions");
  ensure_finite(e.velocities, "langevin velocities");
  return e;
}

PiecewiseLinearCdf boltzmann_cdf(const Potential& potential, double temperature) {
  if (!(temperature > 0.0)) throw DomainError("boltzmann: temperature must be positive");
  const Grid& g = potential.grid();
  const std::size_t m = 16 * g.size() + 1;
  const double h = g.length() / static_cast<double>(m - 1);
  std::vector<double> nodes(m);
  std::vector<double> energy(m);
  for (std::size_t j = 0; j < m; ++j) {
    nodes[j] = g.origin() + h * static_cast<double>(j);
    energy[j] = potential.value_at(nodes[j]);
  }
  const double u_min = *std::min_element(energy.begin(), energy.end());
  std::vector<double> weight(m);
  for (std::size_t j = 0; j < m; ++j) weight[j] = std::exp(-(energy[j] - u_min) / temperature);
  return PiecewiseLinearCdf(std::move(nodes), weight);
}

double boltzmann_distance(const BrownianEnsemble& ensemble, const Potential& potential,
                          double at_time) {
  const std::size_t k = ensemble.time_index(at_time);
  const PiecewiseLinearCdf cdf = boltzmann_cdf(potential, ensemble.params.temperature);
  return ks_distance(EmpiricalSample{ensemble.positions_at(k), {}},
                     [&](double x) { return cdf(x); });
}

double BandwidthRule::resolve(const EmpiricalSample& sample) const {
  if (fixed) {
    if (!(*fixed > 0.0)) throw DomainError("bandwidth: fixed value must be positive");
    return *fixed;
  }
  if (!(factor > 0.0)) throw DomainError("bandwidth: factor must be positive");
  return factor * silverman_bandwidth(sample);
}

BrownianEnsemble meanfield_evolve(const Potential& potential, const LangevinParams& params,
                                  const InitialConditions& initial, const BandwidthRule& bandwidth) {
  params.validate();
  if (params.n_paths < kMinMeanFieldPaths) {
    throw DomainError("meanfield: need at least 1000 paths for the density estimate");
  }
  check_initial(initial, params.n_paths);
  check_dt(potential, params);
  BrownianEnsemble e = allocate(params);
  const std::size_t steps = params.n_steps();
  const std::size_t nt = e.n_times();
  const std::size_t n_paths = params.n_paths;
  const auto n = static_cast<std::ptrdiff_t>(n_paths);
  const Grid& pg = potential.grid();
  const Grid kde_grid(kMeanFieldKdePoints, pg.length(), pg.origin());
  const bool thermal = params.temperature > 0.0;

  std::vector<double> x = initial.positions;
  std::vector<double> v = initial.velocities;
  std::vector<double> force(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    e.positions[p * nt] = x[p];
    e.velocities[p * nt] = v[p];
  }

  EmpiricalSample sample;
  for (std::size_t s = 0; s < steps; ++s) {
    if (thermal) {
      sample.values = x;
      const KdeFields fields = kde_with_derivative(sample, kde_grid, bandwidth.resolve(sample));
      double peak = 0.0;
      for (double r : fields.density.values) peak = std::max(peak, r);
      bool underflow = false;
#pragma omp parallel for schedule(static) reduction(|| : underflow)
      for (std::ptrdiff_t pi = 0; pi < n; ++pi) {
        const auto p = static_cast<std::size_t>(pi);
        const Stencil st = cubic_stencil(kde_grid, x[p]);
        const double rho = interpolate(fields.density.values, st);
        const double drho = interpolate(fields.derivative.values, st);
        if (!(rho > 1e-14 * peak)) underflow = true;
        force[p] = -params.temperature * drho / rho;
      }
      if (underflow) {
        throw DomainError("meanfield: density estimate underflows at a path position (step " +
                          std::to_string(s) + ")");
      }
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t pi = 0; pi < n; ++pi) {
      const auto p = static_cast<std::size_t>(pi);
      const double kick = thermal ? force[p] * params.dt : 0.0;
      advance(x[p], v[p], -potential.derivative_at(x[p], 1), kick, params);
      if ((s + 1) % params.record_stride == 0) {
        const std::size_t k = (s + 1) / params.record_stride;
        e.positions[p * nt + k] = x[p];
        e.velocities[p * nt + k] = v[p];
      }
    }
  }
  ensure_finite(e.positions, "meanfield positions");
  ensure_finite(e.velocities, "meanfield velocities");
  return e;
}

TrajectoryStats trajectory_stats(const BrownianEnsemble& ensemble, std::span<const std::size_t> lags,
                                 std::size_t start) {
  const std::size_t nt = ensemble.n_times();
  if (start >= nt) throw DomainError("trajectory_stats: start beyond series");
  if (ensemble.velocities.size() != ensemble.positions.size()) {
    throw DomainError("trajectory_stats: velocities not recorded");
  }
  TrajectoryStats out;
  const double spacing = nt > 1 ? ensemble.times[1] - ensemble.times[0] : 0.0;
  for (std::size_t lag : lags) {
    if (lag >= nt - start) {
      throw DomainError("trajectory_stats: lag " + std::to_string(lag) +
                        " exceeds the series length");
    }
    double msd = 0.0;
    double vacf = 0.0;
    const std::size_t origins = nt - start - lag;
    for (std::size_t p = 0; p < ensemble.n_paths(); ++p) {
      for (std::size_t k = start; k < start + origins; ++k) {
        const double dx = ensemble.position(p, k + lag) - ensemble.position(p, k);
        msd += dx * dx;
        vacf += ensemble.velocity(p, k) * ensemble.velocity(p, k + lag);
      }
    }
    const double count = static_cast<double>(origins * ensemble.n_paths());
    out.lags.push_back(lag);
    out.lag_times.push_back(static_cast<double>(lag) * spacing);
    out.msd.push_back(lag == 0 ? 0.0 : msd / count);
    out.vacf.push_back(vacf / count);
  }
  return out;
}

double thermal_balance_residual(const EmpiricalSample& sample, const Potential& potential,
                                double temperature, double support) {
  if (!(temperature > 0.0)) throw DomainError("thermal balance: temperature must be positive");
  const Grid& pg = potential.grid();
  const Grid grid(kMeanFieldKdePoints, pg.length(), pg.origin());
  const KdeFields f = kde_with_derivative(sample, grid);
  const double peak = *std::max_element(f.density.values.begin(), f.density.values.end());
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double rho = f.density.values[j];
    if (rho < support * peak) continue;
    const double drift = potential.derivative_at(grid.x(j), 1) * rho;
    worst = std::max(worst, std::abs(drift + temperature * f.derivative.values[j]));
    scale = std::max(scale, std::abs(drift));
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace qhydro
