#include "qhydro/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qhydro/fft.hpp"

namespace qhydro {

void PhysicalConstants::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw DomainError("constants: hbar must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("constants: mass must be positive");
}

namespace {

Complex gaussian_amplitude(const GaussianState& g, double x, double hbar) {
  const double d = x - g.x0;
  return std::exp(Complex{-d * d / (4.0 * g.sigma * g.sigma), g.p0 * x / hbar});
}

void validate_gaussian(const GaussianState& g) {
  if (!(g.sigma > 0.0)) throw DomainError("gaussian state: sigma must be positive");
  if (!std::isfinite(g.x0) || !std::isfinite(g.p0)) {
    throw DomainError("gaussian state: x0 and p0 must be finite");
  }
}

// Normalized Hermite functions h_n(xi) by upward recursion.
double hermite_function(unsigned level, double xi) {
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
  for (unsigned n = 0; n < level; ++n) {
    const double next = std::sqrt(2.0 / (n + 1.0)) * xi * cur - std::sqrt(n / (n + 1.0)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

void normalize(std::vector<Complex>& values, double cell) {
  double sum = 0.0;
  for (const Complex& v : values) sum += std::norm(v);
  const double norm = sum * cell;
  if (!(norm > 0.0)) throw DomainError("init_state: state has zero norm on this grid");
  const double scale = 1.0 / std::sqrt(norm);
  for (Complex& v : values) v *= scale;
}

void check_tails_1d(const ComplexField& psi) {
  const double edge = std::max(std::abs(psi.values.front()), std::abs(psi.values.back()));
  if (edge >= kTailTolerance) {
    throw DomainError("init_state: |psi| at the domain edge is " + std::to_string(edge) +
                      ", exceeds tail tolerance 1e-10; enlarge the domain");
  }
}

void check_tails_2d(const ComplexField2D& psi) {
  const std::size_t n1 = psi.grid.axis1.size();
  const std::size_t n2 = psi.grid.axis2.size();
  double edge = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    edge = std::max({edge, std::abs(psi.at(i, 0)), std::abs(psi.at(i, n2 - 1))});
  }
  for (std::size_t i = 0; i < n2; ++i) {
    edge = std::max({edge, std::abs(psi.at(0, i)), std::abs(psi.at(n1 - 1, i))});
  }
  if (edge >= kTailTolerance) {
    throw DomainError("init_state: |psi| at the domain edge exceeds tail tolerance 1e-10");
  }
}

void check_dt(double dt, double spacing, PhysicalConstants c, const StepOptions& options) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("step: dt must be positive");
  const double bound = options.cfl * c.mass * spacing * spacing / c.hbar;
  if (dt > bound) {
    throw DomainError("step: dt = " + std::to_string(dt) + " exceeds the stability bound " +
                      std::to_string(bound));
  }
}

}  // namespace

WaveField init_state(const StateSpec& spec, const Grid& grid, PhysicalConstants constants) {
  constants.validate();
  ComplexField psi(grid);
  if (const auto* g = std::get_if<GaussianState>(&spec)) {
    validate_gaussian(*g);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      psi.values[j] = gaussian_amplitude(*g, grid.x(j), constants.hbar);
    }
  } else {
    const auto& e = std::get<HarmonicEigenstate>(spec);
    if (!(e.omega > 0.0)) throw DomainError("eigenstate: omega must be positive");
    if (e.propagator_dt < 0.0 || e.omega * e.propagator_dt >= 2.0) {
      throw DomainError("eigenstate: propagator_dt must satisfy 0 <= omega*dt < 2");
    }
    const double w = e.omega * std::sqrt(1.0 - 0.25 * std::pow(e.omega * e.propagator_dt, 2));
    const double scale = std::sqrt(constants.mass * w / constants.hbar);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      psi.values[j] = hermite_function(e.level, scale * (grid.x(j) - e.center));
    }
  }
  normalize(psi.values, grid.spacing());
  check_tails_1d(psi);
  return WaveField{std::move(psi), constants, 0.0};
}

WaveField2D init_state(const PairStateSpec& spec, const Grid2D& grid, PhysicalConstants constants) {
  constants.validate();
  ComplexField2D psi(grid);
  const std::size_t n1 = grid.axis1.size();
  const std::size_t n2 = grid.axis2.size();
  if (const auto* p = std::get_if<ProductState>(&spec)) {
    validate_gaussian(p->first);
    validate_gaussian(p->second);
    for (std::size_t i = 0; i < n1; ++i) {
      const Complex g1 = gaussian_amplitude(p->first, grid.axis1.x(i), constants.hbar);
      for (std::size_t k = 0; k < n2; ++k) {
        psi.values[grid.index(i, k)] =
            g1 * gaussian_amplitude(p->second, grid.axis2.x(k), constants.hbar);
      }
    }
  } else {
    const auto& s = std::get<SymmetrizedPairState>(spec);
    if (!(s.sigma > 0.0)) throw DomainError("pair state: sigma must be positive");
    const auto g = [&](double x) { return std::exp(-x * x / (4.0 * s.sigma * s.sigma)); };
    const double a = s.separation;
    for (std::size_t i = 0; i < n1; ++i) {
      const double x1 = grid.axis1.x(i);
      for (std::size_t k = 0; k < n2; ++k) {
        const double x2 = grid.axis2.x(k);
        psi.values[grid.index(i, k)] = g(x1 - a) * g(x2 + a) + g(x1 + a) * g(x2 - a);
      }
    }
  }
  normalize(psi.values, grid.axis1.spacing() * grid.axis2.spacing());
  check_tails_2d(psi);
  return WaveField2D{std::move(psi), constants, 0.0};
}

// --- propagation -----------------------------------------------------------

SplitStepPropagator::SplitStepPropagator(const Potential& potential, PhysicalConstants constants,
                                         double dt, StepOptions options)
    : grid_(potential.grid()), constants_(constants), dt_(dt) {
  constants.validate();
  check_dt(dt, grid_.spacing(), constants, options);
  const std::size_t n = grid_.size();
  half_potential_.resize(n);
  kinetic_.resize(n);
  const auto& u = potential.values().values;
  const auto k = grid_.wavenumbers();
  for (std::size_t j = 0; j < n; ++j) {
    half_potential_[j] = std::polar(1.0, -u[j] * dt / (2.0 * constants.hbar));
    kinetic_[j] = std::polar(1.0, -constants.hbar * k[j] * k[j] * dt / (2.0 * constants.mass));
  }
}

void SplitStepPropagator::advance(WaveField& state, std::size_t n_steps) const {
  if (!(state.grid() == grid_)) throw DomainError("step: state and potential grids differ");
  if (!(state.constants == constants_)) throw DomainError("step: physical constants differ");
  auto& v = state.psi.values;
  const std::size_t n = v.size();
  for (std::size_t s = 0; s < n_steps; ++s) {
    for (std::size_t j = 0; j < n; ++j) v[j] *= half_potential_[j];
    fft::forward(v);
    for (std::size_t j = 0; j < n; ++j) v[j] *= kinetic_[j];
    fft::inverse(v);
    for (std::size_t j = 0; j < n; ++j) v[j] *= half_potential_[j];
    state.time += dt_;
  }
}

WaveField SplitStepPropagator::step(const WaveField& state) const {
  WaveField out = state;
  advance(out, 1);
  return out;
}

SplitStepPropagator2D::SplitStepPropagator2D(const Potential& per_particle, const Grid2D& grid,
                                             PhysicalConstants constants, double dt,
                                             StepOptions options)
    : grid_(grid), constants_(constants), dt_(dt) {
  constants.validate();
  if (!(per_particle.grid() == grid.axis1) || !(per_particle.grid() == grid.axis2)) {
    throw DomainError("step2d: potential grid must match both axes");
  }
  check_dt(dt, std::min(grid.axis1.spacing(), grid.axis2.spacing()), constants, options);
  const std::size_t n1 = grid.axis1.size();
  const std::size_t n2 = grid.axis2.size();
  half_potential_.resize(grid.size());
  kinetic_.resize(grid.size());
  const auto& u = per_particle.values().values;
  const auto k1 = grid.axis1.wavenumbers();
  const auto k2 = grid.axis2.wavenumbers();
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t k = 0; k < n2; ++k) {
      const std::size_t idx = grid.index(i, k);
      half_potential_[idx] = std::polar(1.0, -(u[i] + u[k]) * dt / (2.0 * constants.hbar));
      const double ksq = k1[i] * k1[i] + k2[k] * k2[k];
      kinetic_[idx] = std::polar(1.0, -constants.hbar * ksq * dt / (2.0 * constants.mass));
    }
  }
}

void SplitStepPropagator2D::advance(WaveField2D& state, std::size_t n_steps) const {
  if (!(state.grid() == grid_)) throw DomainError("step2d: state grid differs");
  auto& v = state.psi.values;
  const std::size_t n1 = grid_.axis1.size();
  const std::size_t n2 = grid_.axis2.size();
  for (std::size_t s = 0; s < n_steps; ++s) {
    for (std::size_t j = 0; j < v.size(); ++j) v[j] *= half_potential_[j];
    fft::forward2d(v, n1, n2);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] *= kinetic_[j];
    fft::inverse2d(v, n1, n2);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] *= half_potential_[j];
    state.time += dt_;
  }
}

WaveField2D SplitStepPropagator2D::step(const WaveField2D& state) const {
  WaveField2D out = state;
  advance(out, 1);
  return out;
}

WaveField step(const WaveField& state, const Potential& potential, double dt,
               StepOptions options) {
  return SplitStepPropagator(potential, state.constants, dt, options).step(state);
}

// --- observables -----------------------------------------------------------

Observables observables(const WaveField& state, const Potential& potential) {
  const Grid& g = state.grid();
  const auto& psi = state.psi.values;
  const auto& u = potential.values().values;
  const double dx = g.spacing();
  const std::size_t n = g.size();
  const double hbar = state.constants.hbar;
  const double m = state.constants.mass;

  Observables o;
  double sx = 0.0;
  double sxx = 0.0;
  double su = 0.0;
  double sn = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double rho = std::norm(psi[j]);
    const double x = g.x(j);
    sn += rho;
    sx += x * rho;
    sxx += x * x * rho;
    su += u[j] * rho;
  }
  o.norm = sn * dx;
  o.mean_x = sx * dx;
  o.var_x = std::max(0.0, sxx * dx - o.mean_x * o.mean_x);

  // <p> and kinetic energy by Parseval on the spectral coefficients.
  std::vector<Complex> hat(psi.begin(), psi.end());
  fft::forward(hat);
  const auto k = g.wavenumbers();
  double sp = 0.0;
  double sk = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = std::norm(hat[j]);
    if (j != g.nyquist_index()) sp += k[j] * w;
    sk += k[j] * k[j] * w;
  }
  const double parseval = dx / static_cast<double>(n);
  o.mean_p = hbar * sp * parseval;
  o.energy = hbar * hbar / (2.0 * m) * sk * parseval + su * dx;
  return o;
}

double overlap_probability(const WaveField& a, const WaveField& b) {
  if (!(a.grid() == b.grid())) throw DomainError("overlap: grids differ");
  Complex acc{0.0, 0.0};
  for (std::size_t j = 0; j < a.psi.size(); ++j) acc += std::conj(a.psi.values[j]) * b.psi.values[j];
  return std::norm(acc * a.grid().spacing());
}

TraceSample sample_trace(const WaveField& state, const Potential& potential) {
  TraceSample s;
  s.time = state.time;
  s.obs = observables(state, potential);
  const auto& du = potential.derivative(1).values;
  double acc = 0.0;
  for (std::size_t j = 0; j < du.size(); ++j) acc += du[j] * std::norm(state.psi.values[j]);
  s.mean_force = acc * state.grid().spacing();
  return s;
}

EhrenfestResidual ehrenfest_residual(std::span<const TraceSample> trace, double mass) {
  if (trace.size() < 3) throw DomainError("ehrenfest_residual: need at least 3 samples");
  if (!(mass > 0.0)) throw DomainError("ehrenfest_residual: mass must be positive");
  const double h = trace[1].time - trace[0].time;
  if (!(h > 0.0)) throw DomainError("ehrenfest_residual: times must increase");
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const double hi = trace[i].time - trace[i - 1].time;
    if (std::abs(hi - h) > 1e-9 * h) {
      throw DomainError("ehrenfest_residual: samples must be uniformly spaced");
    }
  }
  EhrenfestResidual r;
  for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
    const double dxdt = (trace[i + 1].obs.mean_x - trace[i - 1].obs.mean_x) / (2.0 * h);
    const double dpdt = (trace[i + 1].obs.mean_p - trace[i - 1].obs.mean_p) / (2.0 * h);
    r.r1 = std::max(r.r1, std::abs(dxdt - trace[i].obs.mean_p / mass));
    r.r2 = std::max(r.r2, std::abs(dpdt + trace[i].mean_force));
  }
  return r;
}

}  // namespace qhydro
