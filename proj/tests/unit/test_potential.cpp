#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qhydro/potential.hpp"

using namespace qhydro;

TEST_SUITE("potential") {

TEST_CASE("harmonic closed-form values and derivatives") {
  Grid g(64, 10.0, -5.0);
  auto U = Potential::harmonic(g, 2.0, 0.5);
  for (std::size_t j = 0; j < g.size(); ++j) {
    double x = g.x(j);
    CHECK(U.values()[j] == doctest::Approx(0.25 * 4.0 * x * x));
    CHECK(U.derivative(1)[j] == doctest::Approx(2.0 * x));
    CHECK(U.derivative(2)[j] == doctest::Approx(2.0));
    CHECK(U.derivative(3)[j] == 0.0);
  }
  CHECK(U.derivatives_vanish_from(3));
  CHECK(U.characteristic_frequency(0.5) == doctest::Approx(2.0));
}

TEST_CASE("quartic series terminates after the fourth derivative") {
  Grid g(64, 10.0, -5.0);
  auto U = Potential::quartic(g, 0.1, 0.3);
  CHECK(U.derivative_at(1.5, 1) == doctest::Approx(2 * 0.3 * 1.5 + 0.4 * 1.5 * 1.5 * 1.5));
  CHECK(U.derivative_at(0.7, 4) == doctest::Approx(2.4));
  CHECK(U.derivative_at(0.7, 5) == 0.0);
  CHECK(U.derivatives_vanish_from(5));
  CHECK_FALSE(U.derivatives_vanish_from(4));
}

TEST_CASE("double well minima and stiffness") {
  Grid g(128, 8.0, -4.0);
  auto U = Potential::double_well(g, 1.0, 1.0);
  CHECK(U.value_at(1.0) == doctest::Approx(0.0));
  CHECK(U.value_at(0.0) == doctest::Approx(1.0));
  // U'' = 8 a b at x = +-sqrt(b)
  CHECK(U.characteristic_frequency(1.0) == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("free potential has no frequency") {
  Grid g(16, 1.0, 0.0);
  auto U = Potential::free(g);
  CHECK(U.characteristic_frequency(1.0) == 0.0);
  CHECK(U.derivatives_vanish_from(0));
}

TEST_CASE("tabulated potentials are differentiated spectrally") {
  const double L = 2 * std::numbers::pi;
  Grid g(64, L, 0.0);
  RealField v(g);
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = std::cos(g.x(j));
  auto U = Potential::tabulated(v);
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(std::abs(U.derivative(1)[j] + std::sin(g.x(j))) < 1e-10);
    CHECK(std::abs(U.derivative(3)[j] - std::sin(g.x(j))) < 1e-10);
    CHECK(std::abs(U.derivative(5)[j] + std::sin(g.x(j))) < 1e-8);
  }
  CHECK(U.value_at(0.5 * g.spacing()) == doctest::Approx(std::cos(0.5 * g.spacing())).epsilon(1e-5));
}

TEST_CASE("derivative order outside the cache is rejected") {
  Grid g(16, 1.0, 0.0);
  auto U = Potential::harmonic(g, 1.0, 1.0);
  CHECK_THROWS_AS(U.derivative(6), DomainError);
  CHECK_THROWS_AS(U.derivative(-1), DomainError);
}

}
