#include "qhydro/bohm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qhydro/analysis.hpp"
#include "qhydro/rng.hpp"

namespace qhydro {

FieldTape::Frame FieldTape::make_frame(MadelungFields&& s, const Potential& potential) {
  const Grid& grid = s.grid();
  if (!(potential.grid() == grid)) throw DomainError("tape: potential grid differs from frames");
  const auto& du = potential.derivative(1).values;
  RealField accel(grid);
  const double m = s.constants.mass;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (s.mask[j]) accel.values[j] = -(du[j] + s.grad_Q.values[j]) / m;
  }
  return Frame{s.time, std::move(s.rho), std::move(s.V), std::move(accel), std::move(s.mask)};
}

FieldTape::FieldTape(std::vector<MadelungFields> snapshots, const Potential& potential)
    : FieldTape([&] {
        std::vector<Frame> frames;
        frames.reserve(snapshots.size());
        for (MadelungFields& s : snapshots) frames.push_back(make_frame(std::move(s), potential));
        return frames;
      }()) {}

FieldTape::FieldTape(std::vector<Frame> frames) : frames_(std::move(frames)) {
  if (frames_.size() < 2) throw DomainError("tape: need at least two frames");
  frame_dt_ = frames_[1].time - frames_[0].time;
  if (!(frame_dt_ > 0.0)) throw DomainError("tape: frame times must increase");
  const Grid& grid = frames_.front().rho.grid;
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (!(frames_[i].rho.grid == grid)) throw DomainError("tape: frames must share one grid");
    const double expected = frames_.front().time + static_cast<double>(i) * frame_dt_;
    if (std::abs(frames_[i].time - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      throw DomainError("tape: frame times must be uniformly spaced");
    }
  }
}

std::vector<double> FieldTape::times() const {
  std::vector<double> t(frames_.size());
  for (std::size_t i = 0; i < frames_.size(); ++i) t[i] = frames_[i].time;
  return t;
}

std::size_t FieldTape::frame_index(double t) const {
  const double q = (t - start_time()) / frame_dt_;
  const double k = std::round(q);
  if (k < 0.0 || k > static_cast<double>(frames_.size() - 1) ||
      std::abs(q - k) > 1e-9 * std::max(1.0, q)) {
    throw DomainError("tape: time " + std::to_string(t) + " is not a frame time");
  }
  return static_cast<std::size_t>(k);
}

FieldTape record_tape(const WaveField& initial, const Potential& potential, double dt,
                      std::size_t frame_stride, std::size_t n_frames, double rho_floor) {
  if (frame_stride == 0) throw DomainError("record_tape: frame_stride must be positive");
  if (n_frames < 2) throw DomainError("record_tape: need at least two frames");
  const SplitStepPropagator prop(potential, initial.constants, dt);
  WaveField state = initial;
  std::vector<FieldTape::Frame> frames;
  frames.reserve(n_frames);
  frames.push_back(FieldTape::make_frame(decompose(state, rho_floor), potential));
  for (std::size_t i = 1; i < n_frames; ++i) {
    prop.advance(state, frame_stride);
    // Snap to the exact frame time; accumulated rounding in state.time is ~1e-13.
    state.time = initial.time + static_cast<double>(i * frame_stride) * dt;
    frames.push_back(FieldTape::make_frame(decompose(state, rho_floor), potential));
  }
  return FieldTape(std::move(frames));
}

FlaggedPathsError::FlaggedPathsError(std::size_t f, std::size_t t)
    : std::runtime_error("trajectory integration: " + std::to_string(f) + " of " +
                         std::to_string(t) + " paths left the density mask (limit 1%)"),
      flagged(f),
      total(t) {}

std::vector<double> TrajectoryEnsemble::positions_at(std::size_t k, bool skip_flagged) const {
  std::vector<double> out;
  out.reserve(n_paths());
  for (std::size_t p = 0; p < n_paths(); ++p) {
    if (skip_flagged && flagged[p]) continue;
    out.push_back(position(p, k));
  }
  return out;
}

std::size_t TrajectoryEnsemble::time_index(double t) const {
  const double spacing = times.size() > 1 ? times[1] - times[0] : 1.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - t) <= 1e-9 * spacing) return k;
  }
  throw DomainError("trajectory ensemble: time " + std::to_string(t) + " is not a stored time");
}

std::size_t TrajectoryEnsemble::flagged_count() const {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), std::uint8_t{1}));
}

namespace {

enum class Field { velocity, acceleration };

// Evaluates tape fields at a position and a fractional frame coordinate.
class TapeSampler {
 public:
  explicit TapeSampler(const FieldTape& tape) : tape_(tape) {}

  // Returns false if the stencil touches a masked-out node.
  bool eval(Field field, double x, double q, double& out) const {
    const std::size_t last = tape_.size() - 1;
    auto i = static_cast<std::size_t>(std::floor(q));
    if (i >= last) i = last - 1;
    const double alpha = q - static_cast<double>(i);
    const Stencil s = cubic_stencil(tape_.grid(), x);
    double acc = 0.0;
    if (alpha < 1.0) {
      double v = 0.0;
      if (!sample(tape_.frame(i), field, s, v)) return false;
      acc += (1.0 - alpha) * v;
    }
    if (alpha > 0.0) {
      double v = 0.0;
      if (!sample(tape_.frame(i + 1), field, s, v)) return false;
      acc += alpha * v;
    }
    out = acc;
    return true;
  }

 private:
  static bool sample(const FieldTape::Frame& f, Field field, const Stencil& s, double& out) {
    for (std::size_t m = 0; m < 4; ++m) {
      if (!f.mask[s.index[m]]) return false;
    }
    out = interpolate(field == Field::velocity ? f.velocity.values : f.acceleration.values, s);
    return true;
  }

  const FieldTape& tape_;
};

// Step grid aligned with the frame grid: either `sub` steps per frame or one
// step per `span` frames. Positions are stored every `record_every` steps.
struct StepPlan {
  std::size_t n_steps = 0;
  std::size_t record_every = 1;
  std::size_t sub = 1;
  std::size_t span = 1;

  double frame_coordinate(double step) const {
    return span > 1 ? step * static_cast<double>(span) : step / static_cast<double>(sub);
  }
};

StepPlan plan_steps(const FieldTape& tape, double dt) {
  if (!(dt > 0.0)) throw DomainError("trajectory integration: dt must be positive");
  const std::size_t intervals = tape.size() - 1;
  StepPlan plan;
  const double ratio = tape.frame_dt() / dt;
  const double r = std::round(ratio);
  if (r >= 1.0 && std::abs(ratio - r) <= 1e-9 * r) {
    plan.sub = static_cast<std::size_t>(r);
    plan.n_steps = intervals * plan.sub;
    plan.record_every = plan.sub;
    return plan;
  }
  const double inv = dt / tape.frame_dt();
  const double q = std::round(inv);
  if (q >= 1.0 && std::abs(inv - q) <= 1e-9 * q &&
      intervals % static_cast<std::size_t>(q) == 0) {
    plan.span = static_cast<std::size_t>(q);
    plan.n_steps = intervals / plan.span;
    return plan;
  }
  throw DomainError(
      "trajectory integration: dt must divide the frame spacing or be a multiple of it that "
      "divides the tape length");
}

TrajectoryEnsemble make_ensemble(const FieldTape& tape, const StepPlan& plan, std::size_t n_paths,
                                 bool velocities, std::uint64_t seed) {
  TrajectoryEnsemble e;
  for (std::size_t i = 0; i < tape.size(); i += plan.span) e.times.push_back(tape.frame(i).time);
  e.positions.assign(n_paths * e.times.size(), 0.0);
  if (velocities) e.velocities.assign(n_paths * e.times.size(), 0.0);
  e.flagged.assign(n_paths, 0);
  e.seed = seed;
  return e;
}

void check_flag_budget(const TrajectoryEnsemble& e) {
  const std::size_t f = e.flagged_count();
  if (static_cast<double>(f) > kMaxFlaggedFraction * static_cast<double>(e.n_paths())) {
    throw FlaggedPathsError(f, e.n_paths());
  }
}

}  // namespace

std::vector<double> sample_initial(const RealField& rho0, std::size_t n_paths, std::uint64_t seed) {
  const PiecewiseLinearCdf cdf(rho0);
  const CounterRng rng(seed);
  std::vector<double> out(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) out[p] = cdf.inverse(rng.uniform(p, 0));
  return out;
}

TrajectoryEnsemble integrate_guidance(const FieldTape& tape, std::span<const double> initial,
                                      double dt, std::uint64_t seed) {
  const StepPlan plan = plan_steps(tape, dt);
  const std::size_t n_paths = initial.size();
  TrajectoryEnsemble e = make_ensemble(tape, plan, n_paths, false, seed);
  const std::size_t n_times = e.n_times();
  const TapeSampler sampler(tape);
  const auto n = static_cast<std::ptrdiff_t>(n_paths);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pi = 0; pi < n; ++pi) {
    const auto p = static_cast<std::size_t>(pi);
    double x = initial[p];
    double* out = e.positions.data() + p * n_times;
    out[0] = x;
    bool frozen = false;
    for (std::size_t step = 0; step < plan.n_steps; ++step) {
      if (!frozen) {
        const auto s = static_cast<double>(step);
        const double q0 = plan.frame_coordinate(s);
        const double qh = plan.frame_coordinate(s + 0.5);
        const double q1 = plan.frame_coordinate(s + 1.0);
        double k1, k2, k3, k4;
        if (sampler.eval(Field::velocity, x, q0, k1) &&
            sampler.eval(Field::velocity, x + 0.5 * dt * k1, qh, k2) &&
            sampler.eval(Field::velocity, x + 0.5 * dt * k2, qh, k3) &&
            sampler.eval(Field::velocity, x + dt * k3, q1, k4)) {
          x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } else {
          frozen = true;
        }
      }
      if ((step + 1) % plan.record_every == 0) out[(step + 1) / plan.record_every] = x;
    }
    e.flagged[p] = frozen ? 1 : 0;
  }
  check_flag_budget(e);
  return e;
}

TrajectoryEnsemble integrate_newtonian(const FieldTape& tape, std::span<const double> initial,
                                       double dt, double velocity_offset, std::uint64_t seed) {
  const StepPlan plan = plan_steps(tape, dt);
  const std::size_t n_paths = initial.size();
  TrajectoryEnsemble e = make_ensemble(tape, plan, n_paths, true, seed);
  const std::size_t n_times = e.n_times();
  const TapeSampler sampler(tape);
  const auto n = static_cast<std::ptrdiff_t>(n_paths);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pi = 0; pi < n; ++pi) {
    const auto p = static_cast<std::size_t>(pi);
    double x = initial[p];
    double v = 0.0;
    double a = 0.0;
    bool frozen = !(sampler.eval(Field::velocity, x, 0.0, v) &&
                    sampler.eval(Field::acceleration, x, 0.0, a));
    v += velocity_offset;
    double* xs = e.positions.data() + p * n_times;
    double* vs = e.velocities.data() + p * n_times;
    xs[0] = x;
    vs[0] = v;
    for (std::size_t step = 0; step < plan.n_steps; ++step) {
      if (!frozen) {
        const double q1 = plan.frame_coordinate(static_cast<double>(step) + 1.0);
        const double x1 = x + v * dt + 0.5 * a * dt * dt;
        double a1;
        if (sampler.eval(Field::acceleration, x1, q1, a1)) {
          v += 0.5 * (a + a1) * dt;
          x = x1;
          a = a1;
        } else {
          frozen = true;
        }
      }
      if ((step + 1) % plan.record_every == 0) {
        const std::size_t k = (step + 1) / plan.record_every;
        xs[k] = x;
        vs[k] = v;
      }
    }
    e.flagged[p] = frozen ? 1 : 0;
  }
  check_flag_budget(e);
  return e;
}

double equivariance_distance(const TrajectoryEnsemble& ensemble, const FieldTape& tape, double t) {
  const PiecewiseLinearCdf cdf(tape.frame(tape.frame_index(t)).rho);
  EmpiricalSample sample{ensemble.positions_at(ensemble.time_index(t)), {}};
  return ks_distance(sample, [&](double x) { return cdf(x); });
}

double max_path_deviation(const TrajectoryEnsemble& a, const TrajectoryEnsemble& b) {
  if (a.n_paths() != b.n_paths() || a.times != b.times) {
    throw DomainError("max_path_deviation: ensembles differ in shape or stored times");
  }
  double worst = 0.0;
  for (std::size_t p = 0; p < a.n_paths(); ++p) {
    if (a.flagged[p] || b.flagged[p]) continue;
    for (std::size_t k = 0; k < a.n_times(); ++k) {
      worst = std::max(worst, std::abs(a.position(p, k) - b.position(p, k)));
    }
  }
  return worst;
}

double max_drift(const TrajectoryEnsemble& e) {
  double worst = 0.0;
  for (std::size_t p = 0; p < e.n_paths(); ++p) {
    for (std::size_t k = 1; k < e.n_times(); ++k) {
      worst = std::max(worst, std::abs(e.position(p, k) - e.position(p, 0)));
    }
  }
  return worst;
}

bool preserves_ordering(const TrajectoryEnsemble& e) {
  std::vector<std::size_t> order(e.n_paths());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return e.position(a, 0) < e.position(b, 0); });
  for (std::size_t k = 1; k < e.n_times(); ++k) {
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (e.position(order[i - 1], k) > e.position(order[i], k)) return false;
    }
  }
  return true;
}

}  // namespace qhydro
