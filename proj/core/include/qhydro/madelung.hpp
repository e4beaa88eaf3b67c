#pragma once

#include <cstdint>
#include <vector>

#include "qhydro/grid.hpp"
#include "qhydro/potential.hpp"
#include "qhydro/schrodinger.hpp"

namespace qhydro {

/// Relative density floor: points with rho < rho_floor * max(rho) are masked
/// out of velocities, quantum potential and every residual norm.
inline constexpr double kDefaultRhoFloor = 1e-8;

using Mask = std::vector<std::uint8_t>;

/// Hydrodynamic picture of a wavefunction at one instant.
///
/// Masked-out points carry 0 in V, S, Q and their gradients. `current` is the
/// probability current hbar Im(psi* dpsi/dx) / m, defined everywhere; V is
/// current / rho on the mask. S is the velocity potential: the running
/// integral of m V over the largest contiguous masked run, zero at its left
/// end. Gradients of V and Q are evaluated from spectral derivatives of psi and
/// sqrt(rho) by the chain rule, never by differentiating masked data.
struct MadelungFields {
  RealField rho;
  RealField S;
  RealField V;
  RealField Q;
  RealField current;
  RealField grad_V;
  RealField grad_Q;
  Mask mask;
  PhysicalConstants constants;
  double time = 0.0;
  double rho_floor = kDefaultRhoFloor;

  const Grid& grid() const { return rho.grid; }
};

MadelungFields decompose(const WaveField& state, double rho_floor = kDefaultRhoFloor);

/// Q = -hbar^2 (d^2 sqrt(rho)) / (2 m sqrt(rho)) on the mask, 0 elsewhere.
RealField quantum_potential(const RealField& rho, PhysicalConstants constants,
                            double rho_floor = kDefaultRhoFloor);

Mask density_mask(std::span<const double> rho, double rho_floor);

/// Below this scale the contributing terms are rounding noise (a stationary
/// density differenced over dt ~ 1e-4 already gives ~1e-10).
inline constexpr double kResidualScaleGuard = 1e-8;

/// Max-norm residual over masked points, normalized by the largest
/// contributing term. When that scale is below kResidualScaleGuard the
/// residual is reported unnormalized (normalized == absolute).
struct Residual {
  double normalized = 0.0;
  double absolute = 0.0;
  double scale = 0.0;
};

/// |d rho/dt + d(rho V)/dx| from three snapshots spaced dt apart.
Residual continuity_residual(const MadelungFields& before, const MadelungFields& now,
                             const MadelungFields& after, double dt);

/// |m dV/dt + m V dV/dx + d(U + Q)/dx| from three snapshots spaced dt apart.
Residual force_balance_residual(const MadelungFields& before, const MadelungFields& now,
                                const MadelungFields& after, const Potential& potential,
                                double dt);

/// max over the mask of |d(U + Q)/dx|.
double total_force_magnitude(const MadelungFields& fields, const Potential& potential);

struct FisherComparison {
  double mean_q = 0.0;         // integral of rho Q
  double fisher_scaled = 0.0;  // hbar^2/(8m) * integral of (rho')^2 / rho
};

FisherComparison mean_q_vs_fisher(const RealField& rho, PhysicalConstants constants,
                                  double rho_floor = kDefaultRhoFloor);

/// Two-particle density, quantum potential and mask on a tensor grid.
struct MadelungFields2D {
  RealField2D rho;
  RealField2D Q;
  Mask mask;
  PhysicalConstants constants;
  double rho_floor = kDefaultRhoFloor;
};

MadelungFields2D decompose(const WaveField2D& state, double rho_floor = kDefaultRhoFloor);

/// Mixed derivative d^2 Q / dx1 dx2 on masked points (0 elsewhere).
RealField2D q_mixed_derivative(const MadelungFields2D& fields);

/// max |d^2 Q / dx1 dx2| over masked points whose four neighbours are also
/// masked; zero iff Q splits into Q1(x1) + Q2(x2). Throws if no such point
/// exists, i.e. the floor leaves nothing to measure.
double q_separability(const MadelungFields2D& fields);

}  // namespace qhydro
