#pragma once

#include <array>
#include <string>

#include "qhydro/grid.hpp"

namespace qhydro {

enum class PotentialKind { free, harmonic, quartic, double_well, tabulated };

std::string to_string(PotentialKind kind);

/// External potential U(x) materialized on a grid with cached derivatives
/// up to fifth order.
///
/// Built-in kinds evaluate values and derivatives from closed forms, both on
/// the grid and at arbitrary x; tabulated potentials are differentiated
/// spectrally and evaluated off-grid by cubic interpolation.
///   harmonic:    U = m w^2 x^2 / 2
///   quartic:     U = a x^2 + lambda x^4
///   double_well: U = a (x^2 - b)^2
class Potential {
 public:
  static constexpr int kMaxDerivative = 5;

  static Potential free(const Grid& grid);
  static Potential harmonic(const Grid& grid, double omega, double mass);
  static Potential quartic(const Grid& grid, double lambda, double quadratic = 0.0);
  static Potential double_well(const Grid& grid, double a, double b);
  static Potential tabulated(const RealField& values);

  PotentialKind kind() const { return kind_; }
  const Grid& grid() const { return values_.grid; }
  const RealField& values() const { return values_; }

  /// Cached d^order U / dx^order on the grid, order in [0, 5].
  const RealField& derivative(int order) const;

  double value_at(double x) const { return derivative_at(x, 0); }
  double derivative_at(double x, int order) const;

  /// Angular frequency of the stiffest small-oscillation mode (sqrt(U''/m) at
  /// the minima); zero for potentials without a confining quadratic term.
  double characteristic_frequency(double mass) const;

  /// True when every derivative of order >= `order` vanishes identically.
  bool derivatives_vanish_from(int order) const;

 private:
  Potential(PotentialKind kind, RealField values, std::array<double, 3> params);
  void materialize();
  double analytic(double x, int order) const;

  PotentialKind kind_;
  std::array<double, 3> params_;
  RealField values_;
  std::array<RealField, kMaxDerivative> derivatives_;
};

}  // namespace qhydro
