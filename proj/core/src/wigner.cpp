#include "qhydro/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qhydro/fft.hpp"

namespace qhydro {
namespace {

std::ptrdiff_t signed_index(std::size_t s, std::size_t n) {
  const auto si = static_cast<std::ptrdiff_t>(s);
  const auto ni = static_cast<std::ptrdiff_t>(n);
  return si < ni / 2 ? si : si - ni;
}

std::size_t wrap_index(std::ptrdiff_t i, std::size_t n) {
  const auto ni = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % ni) + ni) % ni);
}

std::ptrdiff_t floor_half(std::ptrdiff_t v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

// Batched row / column transforms of an n x n row-major array.
void rows(std::vector<Complex>& a, std::size_t n, fft::Direction d) {
  fft::transform(a, n, n, 1, n, d);
}
void columns(std::vector<Complex>& a, std::size_t n, fft::Direction d) {
  fft::transform(a, n, n, n, 1, d);
}

// Exponent of the force step per unit time at (x, y): sum over k of
// (hbar^2/4)^k / (2k+1)! * U^(2k+1)(x) * (y/hbar)^(2k+1), for k in [k_lo, k_hi].
double series(const Potential& u, std::size_t ix, double y, double hbar, int k_lo, int k_hi) {
  double acc = 0.0;
  double factorial = 1.0;  // (2k+1)!
  for (int k = 0; k <= k_hi; ++k) {
    if (k > 0) factorial *= (2.0 * k) * (2.0 * k + 1.0);
    if (k < k_lo) continue;
    const double coeff = std::pow(hbar * hbar / 4.0, k) / factorial;
    acc += coeff * u.derivative(2 * k + 1).values[ix] * std::pow(y / hbar, 2 * k + 1);
  }
  return acc;
}

void check_k_max(int k_max) {
  if (k_max < 0 || k_max > kMaxSeriesOrder) {
    throw DomainError("moyal: k_max must be in [0, 2] (derivative cache holds U up to order 5)");
  }
}

std::vector<Complex> to_complex(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

PhaseSpaceGrid PhaseSpaceGrid::conjugate_to(const Grid& x_grid, double hbar) {
  if (!(hbar > 0.0)) throw DomainError("phase space: hbar must be positive");
  const std::size_t n = x_grid.size();
  const double dp = 2.0 * std::numbers::pi * hbar / x_grid.length();
  const double length = dp * static_cast<double>(n);
  return PhaseSpaceGrid{x_grid, Grid(n, length, -0.5 * length)};
}

double WignerField::total() const {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * grid.x.spacing() * grid.p.spacing();
}

WignerField wigner_transform(const WaveField& state) {
  const Grid& g = state.grid();
  const std::size_t n = g.size();
  const double hbar = state.constants.hbar;
  const auto& psi = state.psi.values;

  // psi at half nodes x_j + dx/2 by spectral shift.
  std::vector<Complex> half(psi.begin(), psi.end());
  fft::forward(half);
  const auto k = g.wavenumbers();
  for (std::size_t j = 0; j < n; ++j) half[j] *= std::polar(1.0, 0.5 * k[j] * g.spacing());
  fft::inverse(half);

  std::vector<Complex> work(n * n);
  for (std::size_t ix = 0; ix < n; ++ix) {
    const auto i = static_cast<std::ptrdiff_t>(ix);
    for (std::size_t s = 0; s < n; ++s) {
      const std::ptrdiff_t st = signed_index(s, n);
      Complex a, b;  // psi(x + y/2), psi(x - y/2) with y = st * dx
      if (st % 2 == 0) {
        const std::ptrdiff_t r = st / 2;
        a = psi[wrap_index(i + r, n)];
        b = psi[wrap_index(i - r, n)];
      } else {
        const std::ptrdiff_t r = floor_half(st - 1);
        a = half[wrap_index(i + r, n)];
        b = half[wrap_index(i - r - 1, n)];
      }
      const double sign = (st % 2 == 0) ? 1.0 : -1.0;
      work[ix * n + s] = sign * std::conj(a) * b;
    }
    // y = -L/2 has no partner at +L/2; keep the Hermitian part.
    work[ix * n + n / 2] = work[ix * n + n / 2].real();
  }
  rows(work, n, fft::Direction::inverse);

  WignerField w{PhaseSpaceGrid::conjugate_to(g, hbar), std::vector<double>(n * n),
                state.constants, state.time, 0.0};
  const double scale = g.spacing() / (2.0 * std::numbers::pi * hbar);
  double max_re = 0.0;
  double max_im = 0.0;
  for (std::size_t j = 0; j < n * n; ++j) {
    w.values[j] = scale * work[j].real();
    max_re = std::max(max_re, std::abs(w.values[j]));
    max_im = std::max(max_im, std::abs(scale * work[j].imag()));
  }
  w.max_imag_residue = max_re > 0.0 ? max_im / max_re : max_im;
  return w;
}

Marginals marginals(const WignerField& w) {
  const std::size_t nx = w.grid.x.size();
  const std::size_t np = w.grid.p.size();
  Marginals m{RealField(w.grid.x), RealField(w.grid.p)};
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      const double v = w.values[i * np + j];
      m.rho_x.values[i] += v;
      m.rho_p.values[j] += v;
    }
  }
  for (double& v : m.rho_x.values) v *= w.grid.p.spacing();
  for (double& v : m.rho_p.values) v *= w.grid.x.spacing();
  return m;
}

NegativityDiagnostics negativity(const WignerField& w) {
  NegativityDiagnostics d;
  d.min_value = *std::min_element(w.values.begin(), w.values.end());
  double neg = 0.0;
  for (double v : w.values) {
    if (v < 0.0) neg -= v;
  }
  d.negative_volume = neg * w.grid.x.spacing() * w.grid.p.spacing();
  return d;
}

MoyalPropagator::MoyalPropagator(const PhaseSpaceGrid& grid, const Potential& potential,
                                 PhysicalConstants constants, double dt, int k_max, double max_dt)
    : grid_(grid), constants_(constants), dt_(dt), k_max_(k_max) {
  constants.validate();
  check_k_max(k_max);
  if (!(dt > 0.0) || dt > max_dt) {
    throw DomainError("moyal: dt = " + std::to_string(dt) + " outside (0, " +
                      std::to_string(max_dt) + "]");
  }
  if (!(potential.grid() == grid.x)) throw DomainError("moyal: potential grid differs from x grid");
  const std::size_t n = grid.x.size();
  const double dx = grid.x.spacing();
  const double hbar = constants.hbar;
  half_force_.resize(n * n);
  full_force_.resize(n * n);
  for (std::size_t ix = 0; ix < n; ++ix) {
    for (std::size_t s = 0; s < n; ++s) {
      const double y = static_cast<double>(signed_index(s, n)) * dx;
      const double rate = series(potential, ix, y, hbar, 0, k_max);
      Complex half = std::polar(1.0, 0.5 * dt * rate);
      Complex full = std::polar(1.0, dt * rate);
      if (s == n / 2) {  // unpaired Nyquist coefficient must stay real
        half = half.real();
        full = full.real();
      }
      half_force_[ix * n + s] = half;
      full_force_[ix * n + s] = full;
    }
  }
  advection_.resize(n * n);
  const auto kx = grid.x.wavenumbers();
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex f = std::polar(1.0, -kx[q] * grid.p.x(j) * dt / constants.mass);
      if (q == grid.x.nyquist_index()) f = f.real();
      advection_[q * n + j] = f;
    }
  }
}

void MoyalPropagator::force(std::vector<Complex>& work, const std::vector<Complex>& phase) const {
  const std::size_t n = grid_.x.size();
  rows(work, n, fft::Direction::forward);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < work.size(); ++j) work[j] *= phase[j] * inv;
  rows(work, n, fft::Direction::inverse);
}

void MoyalPropagator::advect(std::vector<Complex>& work) const {
  const std::size_t n = grid_.x.size();
  columns(work, n, fft::Direction::forward);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < work.size(); ++j) work[j] *= advection_[j] * inv;
  columns(work, n, fft::Direction::inverse);
}

void MoyalPropagator::advance(WignerField& w, std::size_t n_steps) const {
  if (!(w.grid == grid_)) throw DomainError("moyal: field grid differs from propagator grid");
  if (!(w.constants == constants_)) throw DomainError("moyal: physical constants differ");
  if (n_steps == 0) return;
  std::vector<Complex> work = to_complex(w.values);
  force(work, half_force_);
  for (std::size_t s = 0; s < n_steps; ++s) {
    advect(work);
    force(work, s + 1 < n_steps ? full_force_ : half_force_);
  }
  for (std::size_t j = 0; j < work.size(); ++j) w.values[j] = work[j].real();
  w.time += static_cast<double>(n_steps) * dt_;
}

WignerField MoyalPropagator::step(const WignerField& w) const {
  WignerField out = w;
  advance(out, 1);
  return out;
}

WignerField moyal_step(const WignerField& w, const Potential& potential, double dt, int k_max) {
  return MoyalPropagator(w.grid, potential, w.constants, dt, k_max).step(w);
}

std::vector<double> quantum_force_term(const WignerField& w, const Potential& potential,
                                       int k_max) {
  check_k_max(k_max);
  const std::size_t n = w.grid.x.size();
  const double dx = w.grid.x.spacing();
  const double hbar = w.constants.hbar;
  std::vector<Complex> work = to_complex(w.values);
  rows(work, n, fft::Direction::forward);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t ix = 0; ix < n; ++ix) {
    for (std::size_t s = 0; s < n; ++s) {
      const double y = static_cast<double>(signed_index(s, n)) * dx;
      const double rate = s == n / 2 ? 0.0 : series(potential, ix, y, hbar, 1, k_max);
      work[ix * n + s] *= Complex{0.0, rate * inv};
    }
  }
  rows(work, n, fft::Direction::inverse);
  std::vector<double> out(n * n);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = work[j].real();
  return out;
}

double crosscheck(const WaveField& state0, const Potential& potential, double t_final, double dt,
                  int k_max) {
  if (!(t_final > 0.0) || !(dt > 0.0)) throw DomainError("crosscheck: t_final and dt must be positive");
  const double steps = std::round(t_final / dt);
  if (std::abs(steps * dt - t_final) > 1e-9 * t_final) {
    throw DomainError("crosscheck: dt must divide t_final");
  }
  const auto n_steps = static_cast<std::size_t>(steps);

  WignerField w = wigner_transform(state0);
  MoyalPropagator(w.grid, potential, state0.constants, dt, k_max).advance(w, n_steps);

  WaveField psi = state0;
  SplitStepPropagator(potential, state0.constants, dt).advance(psi, n_steps);
  const WignerField ref = wigner_transform(psi);

  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t j = 0; j < w.values.size(); ++j) {
    diff = std::max(diff, std::abs(w.values[j] - ref.values[j]));
    scale = std::max(scale, std::abs(ref.values[j]));
  }
  return diff / scale;
}

}  // namespace qhydro
