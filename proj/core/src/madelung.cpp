#include "qhydro/madelung.hpp"

#include <algorithm>
#include <cmath>

namespace qhydro {
namespace {

void check_same_grid(const MadelungFields& a, const MadelungFields& b, const char* what) {
  if (!(a.grid() == b.grid())) throw DomainError(std::string(what) + ": snapshot grids differ");
  if (!(a.constants == b.constants)) {
    throw DomainError(std::string(what) + ": snapshot constants differ");
  }
}

void check_dt(double dt, const char* what) {
  if (!(dt > 0.0)) throw DomainError(std::string(what) + ": dt must be positive");
}

Residual finish(double absolute, double scale) {
  Residual r;
  r.absolute = absolute;
  r.scale = scale;
  r.normalized = scale < kResidualScaleGuard ? absolute : absolute / scale;
  return r;
}

}  // namespace

Mask density_mask(std::span<const double> rho, double rho_floor) {
  if (!(rho_floor > 0.0) || rho_floor >= 1.0) {
    throw DomainError("rho_floor must lie in (0, 1) as a fraction of max(rho)");
  }
  double rmax = 0.0;
  for (double r : rho) rmax = std::max(rmax, r);
  if (!(rmax > 0.0)) throw DomainError("density is identically zero; mask would be empty");
  const double threshold = rho_floor * rmax;
  Mask mask(rho.size());
  for (std::size_t j = 0; j < rho.size(); ++j) mask[j] = rho[j] >= threshold ? 1 : 0;
  return mask;
}

RealField quantum_potential(const RealField& rho, PhysicalConstants constants, double rho_floor) {
  constants.validate();
  const Mask mask = density_mask(rho.values, rho_floor);
  RealField amp(rho.grid);
  for (std::size_t j = 0; j < rho.size(); ++j) amp.values[j] = std::sqrt(std::max(rho.values[j], 0.0));
  const RealField lap = spectral_derivative(amp, 2);
  RealField q(rho.grid);
  const double c = constants.hbar * constants.hbar / (2.0 * constants.mass);
  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (mask[j]) q.values[j] = -c * lap.values[j] / amp.values[j];
  }
  return q;
}

MadelungFields decompose(const WaveField& state, double rho_floor) {
  const Grid& g = state.grid();
  const std::size_t n = g.size();
  const double hbar = state.constants.hbar;
  const double m = state.constants.mass;
  const auto& psi = state.psi.values;

  MadelungFields f{RealField(g), RealField(g), RealField(g), RealField(g), RealField(g),
                   RealField(g), RealField(g), Mask{}, state.constants, state.time, rho_floor};
  for (std::size_t j = 0; j < n; ++j) f.rho.values[j] = std::norm(psi[j]);
  f.mask = density_mask(f.rho.values, rho_floor);

  const ComplexField d1 = spectral_derivative(state.psi, 1);
  const ComplexField d2 = spectral_derivative(state.psi, 2);
  for (std::size_t j = 0; j < n; ++j) {
    f.current.values[j] = hbar / m * (std::conj(psi[j]) * d1.values[j]).imag();
    if (!f.mask[j]) continue;
    f.V.values[j] = f.current.values[j] / f.rho.values[j];
    const Complex ratio = d1.values[j] / psi[j];
    f.grad_V.values[j] = hbar / m * (d2.values[j] / psi[j] - ratio * ratio).imag();
  }

  RealField amp(g);
  for (std::size_t j = 0; j < n; ++j) amp.values[j] = std::abs(psi[j]);
  const RealField a1 = spectral_derivative(amp, 1);
  const RealField a2 = spectral_derivative(amp, 2);
  const RealField a3 = spectral_derivative(amp, 3);
  const double c = hbar * hbar / (2.0 * m);
  for (std::size_t j = 0; j < n; ++j) {
    if (!f.mask[j]) continue;
    const double a = amp.values[j];
    f.Q.values[j] = -c * a2.values[j] / a;
    f.grad_Q.values[j] = -c * (a3.values[j] / a - a2.values[j] * a1.values[j] / (a * a));
  }

  // Velocity potential on the largest contiguous masked run.
  std::size_t best_start = 0;
  std::size_t best_len = 0;
  for (std::size_t j = 0; j < n;) {
    if (!f.mask[j]) {
      ++j;
      continue;
    }
    std::size_t k = j;
    while (k < n && f.mask[k]) ++k;
    if (k - j > best_len) {
      best_len = k - j;
      best_start = j;
    }
    j = k;
  }
  const double dx = g.spacing();
  for (std::size_t j = best_start + 1; j < best_start + best_len; ++j) {
    f.S.values[j] = f.S.values[j - 1] + 0.5 * m * dx * (f.V.values[j - 1] + f.V.values[j]);
  }

  ensure_finite(f.Q.values, "decompose");
  ensure_finite(f.grad_Q.values, "decompose");
  ensure_finite(f.grad_V.values, "decompose");
  return f;
}

Residual continuity_residual(const MadelungFields& before, const MadelungFields& now,
                             const MadelungFields& after, double dt) {
  check_same_grid(before, now, "continuity_residual");
  check_same_grid(now, after, "continuity_residual");
  check_dt(dt, "continuity_residual");
  const RealField div = spectral_derivative(now.current, 1);
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t j = 0; j < now.rho.size(); ++j) {
    if (!(before.mask[j] && now.mask[j] && after.mask[j])) continue;
    const double drho = (after.rho.values[j] - before.rho.values[j]) / (2.0 * dt);
    worst = std::max(worst, std::abs(drho + div.values[j]));
    scale = std::max(scale, std::abs(drho));
  }
  return finish(worst, scale);
}

Residual force_balance_residual(const MadelungFields& before, const MadelungFields& now,
                                const MadelungFields& after, const Potential& potential,
                                double dt) {
  check_same_grid(before, now, "force_balance_residual");
  check_same_grid(now, after, "force_balance_residual");
  check_dt(dt, "force_balance_residual");
  if (!(potential.grid() == now.grid())) {
    throw DomainError("force_balance_residual: potential grid differs");
  }
  const double m = now.constants.mass;
  const auto& du = potential.derivative(1).values;
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t j = 0; j < now.rho.size(); ++j) {
    if (!(before.mask[j] && now.mask[j] && after.mask[j])) continue;
    const double inertia = m * (after.V.values[j] - before.V.values[j]) / (2.0 * dt);
    const double convection = m * now.V.values[j] * now.grad_V.values[j];
    const double external = du[j];
    const double quantum = now.grad_Q.values[j];
    worst = std::max(worst, std::abs(inertia + convection + external + quantum));
    scale = std::max({scale, std::abs(inertia), std::abs(convection), std::abs(external),
                      std::abs(quantum)});
  }
  return finish(worst, scale);
}

double total_force_magnitude(const MadelungFields& fields, const Potential& potential) {
  if (!(potential.grid() == fields.grid())) {
    throw DomainError("total_force_magnitude: potential grid differs");
  }
  const auto& du = potential.derivative(1).values;
  double worst = 0.0;
  for (std::size_t j = 0; j < fields.rho.size(); ++j) {
    if (fields.mask[j]) worst = std::max(worst, std::abs(du[j] + fields.grad_Q.values[j]));
  }
  return worst;
}

FisherComparison mean_q_vs_fisher(const RealField& rho, PhysicalConstants constants,
                                  double rho_floor) {
  const RealField q = quantum_potential(rho, constants, rho_floor);
  const Mask mask = density_mask(rho.values, rho_floor);
  const RealField drho = spectral_derivative(rho, 1);
  double mean_q = 0.0;
  double fisher = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (!mask[j]) continue;
    mean_q += rho.values[j] * q.values[j];
    fisher += drho.values[j] * drho.values[j] / rho.values[j];
  }
  const double dx = rho.grid.spacing();
  const double c = constants.hbar * constants.hbar / (8.0 * constants.mass);
  return {mean_q * dx, c * fisher * dx};
}

MadelungFields2D decompose(const WaveField2D& state, double rho_floor) {
  const Grid2D& g = state.grid();
  MadelungFields2D f{RealField2D(g), RealField2D(g), Mask{}, state.constants, rho_floor};
  for (std::size_t j = 0; j < g.size(); ++j) f.rho.values[j] = std::norm(state.psi.values[j]);
  f.mask = density_mask(f.rho.values, rho_floor);

  RealField2D amp(g);
  for (std::size_t j = 0; j < g.size(); ++j) amp.values[j] = std::abs(state.psi.values[j]);
  const RealField2D a11 = spectral_derivative(amp, 2, 0);
  const RealField2D a22 = spectral_derivative(amp, 0, 2);
  const double c = state.constants.hbar * state.constants.hbar / (2.0 * state.constants.mass);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (f.mask[j]) f.Q.values[j] = -c * (a11.values[j] + a22.values[j]) / amp.values[j];
  }
  return f;
}

RealField2D q_mixed_derivative(const MadelungFields2D& fields) {
  const Grid2D& g = fields.rho.grid;
  RealField2D a(g);
  for (std::size_t j = 0; j < g.size(); ++j) a.values[j] = std::sqrt(std::max(fields.rho.values[j], 0.0));

  // Q = -c L / a with L the Laplacian of a; differentiate the quotient.
  const auto d = [&](int o1, int o2) { return spectral_derivative(a, o1, o2); };
  const RealField2D a1 = d(1, 0);
  const RealField2D a2 = d(0, 1);
  const RealField2D a12 = d(1, 1);
  const RealField2D a20 = d(2, 0);
  const RealField2D a02 = d(0, 2);
  const RealField2D a30 = d(3, 0);
  const RealField2D a12x = d(1, 2);
  const RealField2D a21 = d(2, 1);
  const RealField2D a03 = d(0, 3);
  const RealField2D a31 = d(3, 1);
  const RealField2D a13 = d(1, 3);

  const double c = fields.constants.hbar * fields.constants.hbar / (2.0 * fields.constants.mass);
  RealField2D out(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!fields.mask[j]) continue;
    const double av = a.values[j];
    const double L = a20.values[j] + a02.values[j];
    const double L1 = a30.values[j] + a12x.values[j];
    const double L2 = a21.values[j] + a03.values[j];
    const double L12 = a31.values[j] + a13.values[j];
    const double x1 = a1.values[j];
    const double x2 = a2.values[j];
    out.values[j] = -c * (L12 / av - (L1 * x2 + L2 * x1 + L * a12.values[j]) / (av * av) +
                          2.0 * L * x1 * x2 / (av * av * av));
  }
  return out;
}

double q_separability(const MadelungFields2D& fields) {
  const Grid2D& g = fields.rho.grid;
  const std::size_t n1 = g.axis1.size();
  const std::size_t n2 = g.axis2.size();
  const RealField2D mixed = q_mixed_derivative(fields);
  const auto masked = [&](std::size_t i, std::size_t k) { return fields.mask[g.index(i, k)] != 0; };
  double worst = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 1; i + 1 < n1; ++i) {
    for (std::size_t k = 1; k + 1 < n2; ++k) {
      if (!(masked(i, k) && masked(i - 1, k) && masked(i + 1, k) && masked(i, k - 1) &&
            masked(i, k + 1))) {
        continue;
      }
      ++counted;
      worst = std::max(worst, std::abs(mixed.values[g.index(i, k)]));
    }
  }
  if (counted == 0) {
    throw DomainError(
        "q_separability: rho_floor masks every cross-coupled neighbourhood; nothing to measure");
  }
  return worst;
}

}  // namespace qhydro
