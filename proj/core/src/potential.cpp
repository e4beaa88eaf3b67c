#include "qhydro/potential.hpp"

#include <cmath>
#include <utility>

namespace qhydro {

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::free: return "free";
    case PotentialKind::harmonic: return "harmonic";
    case PotentialKind::quartic: return "quartic";
    case PotentialKind::double_well: return "double_well";
    case PotentialKind::tabulated: return "tabulated";
  }
  return "unknown";
}

namespace {

std::array<RealField, Potential::kMaxDerivative> empty_derivatives(const Grid& g) {
  return {RealField(g), RealField(g), RealField(g), RealField(g), RealField(g)};
}

}  // namespace

Potential::Potential(PotentialKind kind, RealField values, std::array<double, 3> params)
    : kind_(kind),
      params_(params),
      values_(std::move(values)),
      derivatives_(empty_derivatives(values_.grid)) {
  materialize();
}

Potential Potential::free(const Grid& grid) {
  return Potential(PotentialKind::free, RealField(grid), {0.0, 0.0, 0.0});
}

Potential Potential::harmonic(const Grid& grid, double omega, double mass) {
  if (!(omega > 0.0) || !(mass > 0.0)) {
    throw DomainError("harmonic potential: omega and mass must be positive");
  }
  // U = c x^2 with c = m w^2 / 2
  return Potential(PotentialKind::harmonic, RealField(grid), {0.5 * mass * omega * omega, 0.0, 0.0});
}

Potential Potential::quartic(const Grid& grid, double lambda, double quadratic) {
  if (!(lambda > 0.0)) throw DomainError("quartic potential: lambda must be positive");
  if (!std::isfinite(quadratic)) throw DomainError("quartic potential: quadratic must be finite");
  return Potential(PotentialKind::quartic, RealField(grid), {lambda, quadratic, 0.0});
}

Potential Potential::double_well(const Grid& grid, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("double_well potential: a and b must be positive");
  return Potential(PotentialKind::double_well, RealField(grid), {a, b, 0.0});
}

Potential Potential::tabulated(const RealField& values) {
  ensure_finite(values.values, "tabulated potential");
  return Potential(PotentialKind::tabulated, values, {0.0, 0.0, 0.0});
}

void Potential::materialize() {
  const Grid& g = values_.grid;
  if (kind_ == PotentialKind::tabulated) {
    for (int order = 1; order <= kMaxDerivative; ++order) {
      derivatives_[static_cast<std::size_t>(order - 1)] = spectral_derivative(values_, order);
    }
    return;
  }
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.x(j);
    values_.values[j] = analytic(x, 0);
    for (int order = 1; order <= kMaxDerivative; ++order) {
      derivatives_[static_cast<std::size_t>(order - 1)].values[j] = analytic(x, order);
    }
  }
}

double Potential::analytic(double x, int order) const {
  switch (kind_) {
    case PotentialKind::free:
      return 0.0;
    case PotentialKind::harmonic: {
      const double c = params_[0];
      switch (order) {
        case 0: return c * x * x;
        case 1: return 2.0 * c * x;
        case 2: return 2.0 * c;
        default: return 0.0;
      }
    }
    case PotentialKind::quartic: {
      const double lambda = params_[0];
      const double a = params_[1];
      const double x2 = x * x;
      switch (order) {
        case 0: return a * x2 + lambda * x2 * x2;
        case 1: return 2.0 * a * x + 4.0 * lambda * x2 * x;
        case 2: return 2.0 * a + 12.0 * lambda * x2;
        case 3: return 24.0 * lambda * x;
        case 4: return 24.0 * lambda;
        default: return 0.0;
      }
    }
    case PotentialKind::double_well: {
      const double a = params_[0];
      const double b = params_[1];
      const double x2 = x * x;
      switch (order) {
        case 0: return a * (x2 - b) * (x2 - b);
        case 1: return 4.0 * a * x * (x2 - b);
        case 2: return a * (12.0 * x2 - 4.0 * b);
        case 3: return 24.0 * a * x;
        case 4: return 24.0 * a;
        default: return 0.0;
      }
    }
    case PotentialKind::tabulated:
      break;
  }
  return 0.0;
}

const RealField& Potential::derivative(int order) const {
  if (order < 0 || order > kMaxDerivative) {
    throw DomainError("potential: derivative order must be in [0, 5]");
  }
  return order == 0 ? values_ : derivatives_[static_cast<std::size_t>(order - 1)];
}

double Potential::derivative_at(double x, int order) const {
  if (kind_ == PotentialKind::tabulated) return interpolate(derivative(order), x);
  if (order < 0 || order > kMaxDerivative) {
    throw DomainError("potential: derivative order must be in [0, 5]");
  }
  return analytic(x, order);
}

double Potential::characteristic_frequency(double mass) const {
  switch (kind_) {
    case PotentialKind::free:
      return 0.0;
    case PotentialKind::harmonic:
      return std::sqrt(2.0 * params_[0] / mass);
    case PotentialKind::quartic:
      return params_[1] > 0.0 ? std::sqrt(2.0 * params_[1] / mass) : 0.0;
    case PotentialKind::double_well:
      // minima at x^2 = b, U'' = 8 a b
      return std::sqrt(8.0 * params_[0] * params_[1] / mass);
    case PotentialKind::tabulated: {
      double umax = 0.0;
      for (double v : derivatives_[1].values) umax = std::max(umax, v);
      return std::sqrt(umax / mass);
    }
  }
  return 0.0;
}

bool Potential::derivatives_vanish_from(int order) const {
  switch (kind_) {
    case PotentialKind::free: return order >= 0;
    case PotentialKind::harmonic: return order >= 3;
    case PotentialKind::quartic:
    case PotentialKind::double_well: return order >= 5;
    case PotentialKind::tabulated: return false;
  }
  return false;
}

}  // namespace qhydro
