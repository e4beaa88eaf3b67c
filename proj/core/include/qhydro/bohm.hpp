#pragma once

#include <cstdint>
#include <vector>

#include "qhydro/madelung.hpp"
#include "qhydro/potential.hpp"
#include "qhydro/schrodinger.hpp"

namespace qhydro {

/// Hydrodynamic fields sampled at uniformly spaced frame times.
///
/// Each frame keeps the density, the velocity field V and the acceleration
/// -(dU/dx + dQ/dx)/m on the mask. Between frames fields are interpolated
/// cubically in space and linearly in time.
class FieldTape {
 public:
  struct Frame {
    double time = 0.0;
    RealField rho;
    RealField velocity;
    RealField acceleration;
    Mask mask;
  };

  FieldTape(std::vector<MadelungFields> snapshots, const Potential& potential);
  explicit FieldTape(std::vector<Frame> frames);

  static Frame make_frame(MadelungFields&& fields, const Potential& potential);

  const Grid& grid() const { return frames_.front().rho.grid; }
  std::size_t size() const { return frames_.size(); }
  double frame_dt() const { return frame_dt_; }
  double start_time() const { return frames_.front().time; }
  double end_time() const { return frames_.back().time; }
  const Frame& frame(std::size_t i) const { return frames_[i]; }
  std::vector<double> times() const;

  /// Index of the frame at time t (within 1e-9 of a frame time), or throws.
  std::size_t frame_index(double t) const;

 private:
  std::vector<Frame> frames_;
  double frame_dt_ = 0.0;
};

/// Evolve `initial` with the split-step propagator and decompose every
/// `frame_stride` steps, producing n_frames frames starting at the initial time.
FieldTape record_tape(const WaveField& initial, const Potential& potential, double dt,
                      std::size_t frame_stride, std::size_t n_frames,
                      double rho_floor = kDefaultRhoFloor);

/// Paths sampled at the tape's frame times, or at the step times when the
/// step spans several frames. positions and velocities are
/// row-major by path: value(path, k) = data[path * times.size() + k].
struct TrajectoryEnsemble {
  std::vector<double> times;
  std::vector<double> positions;
  std::vector<double> velocities;  // empty when not recorded
  std::vector<std::uint8_t> flagged;
  std::uint64_t seed = 0;

  std::size_t n_paths() const { return flagged.size(); }
  std::size_t n_times() const { return times.size(); }
  double position(std::size_t path, std::size_t k) const { return positions[path * n_times() + k]; }
  double velocity(std::size_t path, std::size_t k) const { return velocities[path * n_times() + k]; }
  std::vector<double> positions_at(std::size_t k, bool skip_flagged = true) const;
  /// Index of the stored time equal to t (within rounding); throws otherwise.
  std::size_t time_index(double t) const;
  std::size_t flagged_count() const;
};

/// Paths whose interpolation stencil touches a masked-out node are frozen and
/// flagged; integration fails when more than this fraction is flagged.
inline constexpr double kMaxFlaggedFraction = 0.01;

class FlaggedPathsError : public std::runtime_error {
 public:
  FlaggedPathsError(std::size_t flagged, std::size_t total);
  std::size_t flagged;
  std::size_t total;
};

/// Inverse-CDF samples of rho0 (piecewise-linear CDF), one per path, drawn
/// from the counter-based stream (seed, path).
std::vector<double> sample_initial(const RealField& rho0, std::size_t n_paths, std::uint64_t seed);

/// dR/dt = V(R, t) by classical RK4. dt must divide the frame spacing or be
/// a whole multiple of it that divides the tape length.
TrajectoryEnsemble integrate_guidance(const FieldTape& tape, std::span<const double> initial,
                                      double dt, std::uint64_t seed = 0);

/// m d^2R/dt^2 = -d(U + Q)/dx by velocity Verlet. Initial velocities are
/// V(R0, t0) + velocity_offset; a nonzero offset breaks the consistency
/// condition linking this law to the guidance law.
TrajectoryEnsemble integrate_newtonian(const FieldTape& tape, std::span<const double> initial,
                                       double dt, double velocity_offset = 0.0,
                                       std::uint64_t seed = 0);

/// KS distance between unflagged ensemble positions at time t (a stored time
/// and a frame time) and the tape density at the same time.
double equivariance_distance(const TrajectoryEnsemble& ensemble, const FieldTape& tape, double t);

/// max over paths and stored times of |a - b| (unflagged in both); the
/// ensembles must share their stored times.
double max_path_deviation(const TrajectoryEnsemble& a, const TrajectoryEnsemble& b);

/// max over paths of max_t |R(t) - R(0)|.
double max_drift(const TrajectoryEnsemble& ensemble);

/// True when the ordering of paths at t0 is preserved at every stored time.
bool preserves_ordering(const TrajectoryEnsemble& ensemble);

}  // namespace qhydro
