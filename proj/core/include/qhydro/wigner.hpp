#pragma once

#include <vector>

#include "qhydro/grid.hpp"
#include "qhydro/potential.hpp"
#include "qhydro/schrodinger.hpp"

namespace qhydro {

/// Position lattice plus the conjugate momentum lattice p_j = hbar k_j,
/// stored in increasing order: p_j = (j - n/2) * dp with dp = 2 pi hbar / L.
struct PhaseSpaceGrid {
  Grid x;
  Grid p;

  static PhaseSpaceGrid conjugate_to(const Grid& x_grid, double hbar);
  friend bool operator==(const PhaseSpaceGrid&, const PhaseSpaceGrid&) = default;
};

/// Real phase-space density, row-major with momentum fastest:
/// W(x_i, p_j) = values[i * n_p + j]. May be negative.
struct WignerField {
  PhaseSpaceGrid grid;
  std::vector<double> values;
  PhysicalConstants constants;
  double time = 0.0;
  double max_imag_residue = 0.0;  // from construction

  double at(std::size_t ix, std::size_t ip) const { return values[ix * grid.p.size() + ip]; }
  double total() const;  // double integral of W
};

/// W(x, p) = 1/(2 pi hbar) * int psi*(x + y/2) psi(x - y/2) exp(i p y / hbar) dy
/// on the periodic y-lattice y_s = s * dx, with half-node samples of psi from
/// spectral shifting. The x-marginal equals |psi|^2 exactly.
WignerField wigner_transform(const WaveField& state);

struct Marginals {
  RealField rho_x;
  RealField rho_p;
};

Marginals marginals(const WignerField& w);

struct NegativityDiagnostics {
  double min_value = 0.0;
  double negative_volume = 0.0;  // integral of |W| over W < 0
};

NegativityDiagnostics negativity(const WignerField& w);

/// Largest supported truncation order of the quantum force series.
inline constexpr int kMaxSeriesOrder = 2;

/// Operator splitting for
///   dW/dt = -(p/m) dW/dx + sum_{k=0}^{k_max} c_k U^(2k+1)(x) d^(2k+1)W/dp^(2k+1),
///   c_k = (hbar / 2i)^(2k) / (2k+1)!,
/// as half force step, exact spectral advection, half force step. The force
/// step is exponentiated exactly in the Fourier variable conjugate to p, so
/// every x-row keeps its p-integral.
class MoyalPropagator {
 public:
  /// dt must be positive and at most max_dt.
  MoyalPropagator(const PhaseSpaceGrid& grid, const Potential& potential,
                  PhysicalConstants constants, double dt, int k_max, double max_dt = 0.1);

  double dt() const { return dt_; }
  int k_max() const { return k_max_; }
  WignerField step(const WignerField& w) const;
  /// n_steps steps with adjacent half force steps fused.
  void advance(WignerField& w, std::size_t n_steps) const;

 private:
  void force(std::vector<Complex>& work, const std::vector<Complex>& phase) const;
  void advect(std::vector<Complex>& work) const;

  PhaseSpaceGrid grid_;
  PhysicalConstants constants_;
  double dt_;
  int k_max_;
  std::vector<Complex> half_force_;  // [ix * n + s]
  std::vector<Complex> full_force_;
  std::vector<Complex> advection_;   // [kx_index * n + ip]
};

WignerField moyal_step(const WignerField& w, const Potential& potential, double dt, int k_max);

/// The quantum part of the force series, sum_{k=1}^{k_max} c_k U^(2k+1) d^(2k+1)W/dp^(2k+1),
/// evaluated spectrally in p.
std::vector<double> quantum_force_term(const WignerField& w, const Potential& potential, int k_max);

/// Evolve wigner_transform(state0) with the Moyal propagator and state0 with
/// the split-step propagator to t_final, return
/// max |W_moyal - W(psi_t)| / max |W(psi_t)|.
double crosscheck(const WaveField& state0, const Potential& potential, double t_final, double dt,
                  int k_max);

}  // namespace qhydro
