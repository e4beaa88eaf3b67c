#pragma once

#include <span>
#include <variant>
#include <vector>

#include "qhydro/grid.hpp"
#include "qhydro/potential.hpp"

namespace qhydro {

struct PhysicalConstants {
  double hbar = 1.0;
  double mass = 1.0;

  void validate() const;
  friend bool operator==(const PhysicalConstants&, const PhysicalConstants&) = default;
};

/// Normalized wavefunction samples on a periodic grid at time `time`.
struct WaveField {
  ComplexField psi;
  PhysicalConstants constants;
  double time = 0.0;

  const Grid& grid() const { return psi.grid; }
};

/// Two distinguishable particles of equal mass on a tensor grid (x1, x2).
struct WaveField2D {
  ComplexField2D psi;
  PhysicalConstants constants;
  double time = 0.0;

  const Grid2D& grid() const { return psi.grid; }
};

// --- initial states --------------------------------------------------------

/// psi ~ exp(-(x - x0)^2 / (4 sigma^2) + i p0 x / hbar)
struct GaussianState {
  double x0 = 0.0;
  double p0 = 0.0;
  double sigma = 1.0;
};

/// n-th harmonic-oscillator eigenstate centred at `center`.
///
/// With propagator_dt > 0 the state is the matching eigenstate of the
/// split-step propagator at that step, whose effective frequency is
/// omega * sqrt(1 - omega^2 dt^2 / 4); evolution with `step` at the same dt
/// then leaves |psi| exactly invariant.
struct HarmonicEigenstate {
  double omega = 1.0;
  unsigned level = 0;
  double center = 0.0;
  double propagator_dt = 0.0;
};

using StateSpec = std::variant<GaussianState, HarmonicEigenstate>;

/// psi(x1, x2) = g1(x1) g2(x2)
struct ProductState {
  GaussianState first;
  GaussianState second;
};

/// psi ~ g(x1 - a) g(x2 + a) + g(x1 + a) g(x2 - a) with real Gaussians of width sigma.
struct SymmetrizedPairState {
  double separation = 2.0;
  double sigma = 1.0;
};

using PairStateSpec = std::variant<ProductState, SymmetrizedPairState>;

/// Maximum |psi| allowed at the domain edges after normalization.
inline constexpr double kTailTolerance = 1e-10;

WaveField init_state(const StateSpec& spec, const Grid& grid, PhysicalConstants constants);
WaveField2D init_state(const PairStateSpec& spec, const Grid2D& grid, PhysicalConstants constants);

// --- propagation -----------------------------------------------------------

struct StepOptions {
  /// Reject dt > cfl * m * spacing^2 / hbar. Set to infinity to disable.
  double cfl = 0.5;
};

/// Strang split-step propagator for a fixed potential and time step:
/// half potential phase, exact kinetic step in Fourier space, half potential
/// phase. Immutable once built; `step` is safe to call concurrently.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const Potential& potential, PhysicalConstants constants, double dt,
                      StepOptions options = {});

  double dt() const { return dt_; }
  WaveField step(const WaveField& state) const;
  void advance(WaveField& state, std::size_t n_steps = 1) const;

 private:
  Grid grid_;
  PhysicalConstants constants_;
  double dt_;
  std::vector<Complex> half_potential_;
  std::vector<Complex> kinetic_;
};

/// Two-particle propagator: U(x1) + U(x2) with a 2D transform.
class SplitStepPropagator2D {
 public:
  SplitStepPropagator2D(const Potential& per_particle, const Grid2D& grid,
                        PhysicalConstants constants, double dt, StepOptions options = {});

  WaveField2D step(const WaveField2D& state) const;
  void advance(WaveField2D& state, std::size_t n_steps = 1) const;

 private:
  Grid2D grid_;
  PhysicalConstants constants_;
  double dt_;
  std::vector<Complex> half_potential_;
  std::vector<Complex> kinetic_;
};

WaveField step(const WaveField& state, const Potential& potential, double dt,
               StepOptions options = {});

// --- observables -----------------------------------------------------------

struct Observables {
  double norm = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double energy = 0.0;
  double var_x = 0.0;
};

Observables observables(const WaveField& state, const Potential& potential);

double overlap_probability(const WaveField& a, const WaveField& b);  // |<a|b>|^2

/// One sample of an expectation-value trace used by the Ehrenfest check.
struct TraceSample {
  double time = 0.0;
  Observables obs;
  double mean_force = 0.0;  // <dU/dx>
};

TraceSample sample_trace(const WaveField& state, const Potential& potential);

struct EhrenfestResidual {
  double r1 = 0.0;  // max |d<x>/dt - <p>/m|
  double r2 = 0.0;  // max |d<p>/dt + <dU/dx>|
};

/// Centered time differences over a uniformly spaced trace of >= 3 samples.
EhrenfestResidual ehrenfest_residual(std::span<const TraceSample> trace, double mass);

}  // namespace qhydro
