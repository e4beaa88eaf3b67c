#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace qhydro {

using Complex = std::complex<double>;

/// Thrown when an operation's precondition on its arguments is violated.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform periodic lattice x_j = origin + j * spacing, j = 0..n-1.
///
/// Wavenumbers follow the discrete Fourier transform ordering
/// {0, 1, ..., n/2 - 1, -n/2, ..., -1} * 2*pi/L; index n/2 is the Nyquist mode.
/// Copies are cheap: the wavenumber table is shared.
class Grid {
 public:
  Grid(std::size_t n_points, double length, double origin);

  std::size_t size() const { return n_; }
  double length() const { return length_; }
  double origin() const { return origin_; }
  double spacing() const { return spacing_; }
  double x(std::size_t j) const { return origin_ + static_cast<double>(j) * spacing_; }
  std::size_t nyquist_index() const { return n_ / 2; }
  std::span<const double> wavenumbers() const { return *k_; }
  std::vector<double> coordinates() const;

  /// Maps any real x into [origin, origin + length).
  double wrap(double x) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.length_ == b.length_ && a.origin_ == b.origin_;
  }

 private:
  std::size_t n_;
  double length_;
  double origin_;
  double spacing_;
  std::shared_ptr<const std::vector<double>> k_;
};

Grid make_grid(std::size_t n_points, double length, double origin);

struct RealField {
  Grid grid;
  std::vector<double> values;

  explicit RealField(Grid g) : grid(std::move(g)), values(grid.size(), 0.0) {}
  RealField(Grid g, std::vector<double> v);
  std::size_t size() const { return values.size(); }
  double operator[](std::size_t j) const { return values[j]; }
  double& operator[](std::size_t j) { return values[j]; }
};

struct ComplexField {
  Grid grid;
  std::vector<Complex> values;

  explicit ComplexField(Grid g) : grid(std::move(g)), values(grid.size()) {}
  ComplexField(Grid g, std::vector<Complex> v);
  std::size_t size() const { return values.size(); }
  Complex operator[](std::size_t j) const { return values[j]; }
  Complex& operator[](std::size_t j) { return values[j]; }
};

/// Tensor-product lattice for two coordinates; storage is row-major with
/// the second axis fastest: index = i1 * n2 + i2.
struct Grid2D {
  Grid axis1;
  Grid axis2;

  std::size_t size() const { return axis1.size() * axis2.size(); }
  std::size_t index(std::size_t i1, std::size_t i2) const { return i1 * axis2.size() + i2; }
  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

struct RealField2D {
  Grid2D grid;
  std::vector<double> values;

  explicit RealField2D(Grid2D g) : grid(std::move(g)), values(grid.size(), 0.0) {}
  double at(std::size_t i1, std::size_t i2) const { return values[grid.index(i1, i2)]; }
};

struct ComplexField2D {
  Grid2D grid;
  std::vector<Complex> values;

  explicit ComplexField2D(Grid2D g) : grid(std::move(g)), values(grid.size()) {}
  Complex at(std::size_t i1, std::size_t i2) const { return values[grid.index(i1, i2)]; }
};

/// order-th derivative via forward transform, multiplication by (i k)^order
/// and inverse transform. Odd orders drop the Nyquist coefficient so that real
/// input maps to real output.
ComplexField spectral_derivative(const ComplexField& f, int order);

/// Real-valued variant. Throws if the discarded imaginary residue exceeds
/// 1e-10 relative to the result.
RealField spectral_derivative(const RealField& f, int order);

/// Mixed partial d^order1/dx1^order1 d^order2/dx2^order2 on a 2D grid.
RealField2D spectral_derivative(const RealField2D& f, int order1, int order2);
ComplexField2D spectral_derivative(const ComplexField2D& f, int order1, int order2);

/// Periodic rectangle rule: spacing * sum(values).
double integrate(const RealField& f);
double integrate(const RealField2D& f);

/// Four-node interpolation stencil around x (periodic indices and weights).
struct Stencil {
  std::array<std::size_t, 4> index;
  std::array<double, 4> weight;
  bool on_node;  // x coincides with index[1]
};

/// Cubic Lagrange stencil over nodes j-1, j, j+1, j+2 where x_j <= x < x_{j+1}
/// after periodic wrapping. Reproduces cubic polynomials exactly.
Stencil cubic_stencil(const Grid& grid, double x);

double interpolate(const RealField& f, double x);
double interpolate(std::span<const double> values, const Stencil& stencil);

/// Throws DomainError naming `what` if any entry is NaN or infinite.
void ensure_finite(std::span<const double> values, const char* what);
void ensure_finite(std::span<const Complex> values, const char* what);

}  // namespace qhydro
