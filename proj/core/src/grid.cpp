#include "qhydro/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "qhydro/fft.hpp"

namespace qhydro {
namespace {

// (i k)^order with the odd-order Nyquist convention.
Complex derivative_symbol(const Grid& grid, std::size_t j, int order) {
  if (order % 2 == 1 && j == grid.nyquist_index()) return {0.0, 0.0};
  const double k = grid.wavenumbers()[j];
  return std::pow(Complex{0.0, k}, order);
}

void check_order(int order) {
  if (order < 0) throw DomainError("spectral_derivative: order must be non-negative");
}

}  // namespace

Grid::Grid(std::size_t n_points, double length, double origin)
    : n_(n_points), length_(length), origin_(origin) {
  if (n_points < 2 || !std::has_single_bit(n_points)) {
    throw DomainError("grid: n_points must be a power of two >= 2, got " +
                      std::to_string(n_points));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw DomainError("grid: length must be positive and finite");
  }
  if (!std::isfinite(origin)) throw DomainError("grid: origin must be finite");
  spacing_ = length / static_cast<double>(n_points);
  auto k = std::make_shared<std::vector<double>>(n_points);
  const double dk = 2.0 * std::numbers::pi / length;
  const auto n = static_cast<std::ptrdiff_t>(n_points);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    (*k)[static_cast<std::size_t>(j)] = dk * static_cast<double>(j < n / 2 ? j : j - n);
  }
  k_ = std::move(k);
}

std::vector<double> Grid::coordinates() const {
  std::vector<double> xs(n_);
  for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
  return xs;
}

double Grid::wrap(double x) const {
  double u = std::fmod(x - origin_, length_);
  if (u < 0.0) u += length_;
  if (u >= length_) u = 0.0;  // fmod rounding at the upper edge
  return origin_ + u;
}

Grid make_grid(std::size_t n_points, double length, double origin) {
  return Grid(n_points, length, origin);
}

RealField::RealField(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw DomainError("RealField: size does not match grid");
}

ComplexField::ComplexField(Grid g, std::vector<Complex> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw DomainError("ComplexField: size does not match grid");
}

ComplexField spectral_derivative(const ComplexField& f, int order) {
  check_order(order);
  ComplexField out = f;
  if (order == 0) return out;
  fft::forward(out.values);
  for (std::size_t j = 0; j < out.size(); ++j) out.values[j] *= derivative_symbol(f.grid, j, order);
  fft::inverse(out.values);
  return out;
}

RealField spectral_derivative(const RealField& f, int order) {
  check_order(order);
  ComplexField c(f.grid);
  std::transform(f.values.begin(), f.values.end(), c.values.begin(),
                 [](double v) { return Complex{v, 0.0}; });
  const ComplexField d = spectral_derivative(c, order);

  RealField out(f.grid);
  double max_re = 0.0;
  double max_im = 0.0;
  double max_in = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out.values[j] = d.values[j].real();
    max_re = std::max(max_re, std::abs(d.values[j].real()));
    max_im = std::max(max_im, std::abs(d.values[j].imag()));
    max_in = std::max(max_in, std::abs(f.values[j]));
  }
  const double kmax = std::numbers::pi / f.grid.spacing();
  const double scale = std::max(max_re, max_in * std::pow(kmax, order));
  if (max_im > 1e-10 * scale && max_im > 1e-300) {
    throw DomainError("spectral_derivative: imaginary residue exceeds 1e-10 relative");
  }
  return out;
}

ComplexField2D spectral_derivative(const ComplexField2D& f, int order1, int order2) {
  check_order(order1);
  check_order(order2);
  ComplexField2D out = f;
  if (order1 == 0 && order2 == 0) return out;
  const std::size_t n1 = f.grid.axis1.size();
  const std::size_t n2 = f.grid.axis2.size();
  fft::forward2d(out.values, n1, n2);
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    const Complex s1 = derivative_symbol(f.grid.axis1, i1, order1);
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
      out.values[i1 * n2 + i2] *= s1 * derivative_symbol(f.grid.axis2, i2, order2);
    }
  }
  fft::inverse2d(out.values, n1, n2);
  return out;
}

RealField2D spectral_derivative(const RealField2D& f, int order1, int order2) {
  ComplexField2D c(f.grid);
  std::transform(f.values.begin(), f.values.end(), c.values.begin(),
                 [](double v) { return Complex{v, 0.0}; });
  const ComplexField2D d = spectral_derivative(c, order1, order2);
  RealField2D out(f.grid);
  for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] = d.values[j].real();
  return out;
}

double integrate(const RealField& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return sum * f.grid.spacing();
}

double integrate(const RealField2D& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return sum * f.grid.axis1.spacing() * f.grid.axis2.spacing();
}

Stencil cubic_stencil(const Grid& grid, double x) {
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  const double u = (grid.wrap(x) - grid.origin()) / grid.spacing();
  auto j = static_cast<std::ptrdiff_t>(std::floor(u));
  double t = u - static_cast<double>(j);
  if (j >= n) {  // u rounded up to n
    j = 0;
    t = 0.0;
  }
  Stencil s{};
  for (std::ptrdiff_t m = 0; m < 4; ++m) {
    s.index[static_cast<std::size_t>(m)] = static_cast<std::size_t>(((j - 1 + m) % n + n) % n);
  }
  s.on_node = (t == 0.0);
  s.weight[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
  s.weight[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  s.weight[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
  s.weight[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
  return s;
}

double interpolate(std::span<const double> values, const Stencil& s) {
  if (s.on_node) return values[s.index[1]];
  double acc = 0.0;
  for (std::size_t m = 0; m < 4; ++m) acc += s.weight[m] * values[s.index[m]];
  return acc;
}

double interpolate(const RealField& f, double x) {
  return interpolate(f.values, cubic_stencil(f.grid, x));
}

void ensure_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite value");
  }
}

void ensure_finite(std::span<const Complex> values, const char* what) {
  for (const Complex& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw DomainError(std::string(what) + ": non-finite value");
    }
  }
}

}  // namespace qhydro
