#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qhydro/analysis.hpp"
#include "qhydro/potential.hpp"

namespace qhydro {

/// Underdamped Langevin parameters. Noise variance per step is
/// 2 * friction * temperature * dt (temperature in energy units).
struct LangevinParams {
  double mass = 1.0;
  double friction = 1.0;
  double temperature = 1.0;  // k_B T; zero gives damped Newtonian motion
  double dt = 0.01;
  double t_final = 1.0;
  std::size_t n_paths = 1000;
  std::uint64_t seed = 0;
  std::size_t record_stride = 1;  // store every record_stride-th step

  void validate() const;
  std::size_t n_steps() const;
};

struct InitialConditions {
  std::vector<double> positions;
  std::vector<double> velocities;
};

/// n draws of N(mean, std^2) from a stream separate from the integration noise.
std::vector<double> gaussian_draws(std::size_t n, double mean, double std_dev, std::uint64_t seed,
                                   std::uint64_t salt = 0);

/// Recorded paths, row-major by path: value(path, k) = data[path * n_times() + k].
struct BrownianEnsemble {
  std::vector<double> times;
  std::vector<double> positions;
  std::vector<double> velocities;
  LangevinParams params;

  std::size_t n_paths() const { return params.n_paths; }
  std::size_t n_times() const { return times.size(); }
  double position(std::size_t path, std::size_t k) const { return positions[path * n_times() + k]; }
  double velocity(std::size_t path, std::size_t k) const { return velocities[path * n_times() + k]; }
  std::vector<double> positions_at(std::size_t k) const;
  std::vector<double> velocities_at(std::size_t k) const;
  /// Index of the stored time equal to t (within rounding); throws otherwise.
  std::size_t time_index(double t) const;
};

/// Largest stable step: 0.1 * min(m / b, 2 pi / w) with w the stiffest mode of U.
double max_stable_dt(const Potential& potential, const LangevinParams& params);

/// dR = (P/m) dt, dP = (-U'(R) - b P/m) dt + sqrt(2 b kT) dW, advanced
/// semi-implicitly (momentum first, position with the updated momentum).
/// Increments come from the counter-based stream (seed, path, step).
BrownianEnsemble langevin_evolve(const Potential& potential, const LangevinParams& params,
                                 const InitialConditions& initial);

/// Normalized CDF of exp(-U / kT) on a fine lattice over the potential grid.
PiecewiseLinearCdf boltzmann_cdf(const Potential& potential, double temperature);

/// KS distance between ensemble positions at `at_time` and the Boltzmann CDF.
double boltzmann_distance(const BrownianEnsemble& ensemble, const Potential& potential,
                          double at_time);

/// Kernel bandwidth for the mean-field closure: `fixed` when set, otherwise
/// factor * Silverman.
struct BandwidthRule {
  double factor = 1.0;
  std::optional<double> fixed;

  double resolve(const EmpiricalSample& sample) const;
};

inline constexpr std::size_t kMinMeanFieldPaths = 1000;
inline constexpr std::size_t kMeanFieldKdePoints = 4096;

class DensityUnderflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic m R'' + b R' = -U'(R) - kT d(ln rho)/dx (R), rho a Gaussian
/// KDE of the current ensemble on a 4096-point lattice spanning the potential
/// grid. Same update as langevin_evolve with the noise replaced by the
/// mean-field force, so both coincide path by path at kT = 0.
BrownianEnsemble meanfield_evolve(const Potential& potential, const LangevinParams& params,
                                  const InitialConditions& initial,
                                  const BandwidthRule& bandwidth = {});

struct TrajectoryStats {
  std::vector<std::size_t> lags;  // in stored samples
  std::vector<double> lag_times;
  std::vector<double> msd;
  std::vector<double> vacf;
};

/// Ensemble- and time-averaged MSD and <v(t) v(t + lag)> over stored samples
/// from `start` on. Lags must be shorter than the remaining series.
TrajectoryStats trajectory_stats(const BrownianEnsemble& ensemble, std::span<const std::size_t> lags,
                                 std::size_t start = 0);

/// Stationary force balance U' rho + kT rho' = 0 evaluated on a KDE of the
/// sample: max |U' rho + kT rho'| / max |U' rho| over nodes where rho exceeds
/// `support` times its maximum.
double thermal_balance_residual(const EmpiricalSample& sample, const Potential& potential,
                                double temperature, double support = 1e-2);

}  // namespace qhydro
