#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qhydro/madelung.hpp"
#include "qhydro/wigner.hpp"

using namespace qhydro;
using std::numbers::pi;

namespace {

const Grid kGrid(128, 20.0, -10.0);

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("wigner") {

TEST_CASE("momentum lattice is conjugate to the position lattice") {
  auto ps = PhaseSpaceGrid::conjugate_to(kGrid, 1.0);
  CHECK(ps.p.size() == kGrid.size());
  CHECK(ps.p.spacing() == doctest::Approx(2 * pi / kGrid.length()));
  CHECK(ps.p.x(kGrid.size() / 2) == doctest::Approx(0.0));
}

TEST_CASE("ground state Wigner function is the phase-space Gaussian") {
  auto w = wigner_transform(init_state(HarmonicEigenstate{1.0, 0}, kGrid, {}));
  double worst = 0.0;
  double lowest = 0.0;
  for (std::size_t i = 0; i < w.grid.x.size(); ++i)
    for (std::size_t j = 0; j < w.grid.p.size(); ++j) {
      double x = w.grid.x.x(i), p = w.grid.p.x(j);
      worst = std::max(worst, std::abs(w.at(i, j) - std::exp(-x * x - p * p) / pi));
      lowest = std::min(lowest, w.at(i, j));
    }
  CHECK(worst < 1e-6);
  CHECK(lowest > -1e-12);
  CHECK(w.max_imag_residue < 1e-10);
  CHECK(std::abs(w.total() - 1.0) < 1e-6);
}

TEST_CASE("first excited state is maximally negative at the origin") {
  auto w = wigner_transform(init_state(HarmonicEigenstate{1.0, 1}, kGrid, {}));
  CHECK(w.grid.x.x(64) == 0.0);
  CHECK(std::abs(w.at(64, 64) + 1.0 / pi) < 1e-4);
  auto neg = negativity(w);
  CHECK(neg.min_value == doctest::Approx(w.at(64, 64)));
  CHECK(neg.negative_volume > 0.0);
}

TEST_CASE("x-marginal reproduces the density") {
  for (auto spec : {GaussianState{0.5, 0.3, 0.8}, GaussianState{-1.0, -1.5, 0.9}}) {
    auto s = init_state(spec, kGrid, {});
    auto m = marginals(wigner_transform(s));
    auto rho = decompose(s).rho;
    CHECK(max_abs_diff(m.rho_x.values, rho.values) < 1e-8);
    CHECK(std::abs(integrate(m.rho_p) - 1.0) < 1e-6);
  }
}

TEST_CASE("marginal moments") {
  auto ground = marginals(wigner_transform(init_state(HarmonicEigenstate{1.0, 0}, kGrid, {})));
  double mx = 0.0, mxx = 0.0;
  for (std::size_t j = 0; j < kGrid.size(); ++j) {
    mx += kGrid.x(j) * ground.rho_x[j];
    mxx += kGrid.x(j) * kGrid.x(j) * ground.rho_x[j];
  }
  mx *= kGrid.spacing();
  mxx *= kGrid.spacing();
  CHECK(std::abs(mxx - mx * mx - 0.5) < 1e-6);

  auto boosted = marginals(wigner_transform(init_state(GaussianState{0.0, 2.0, 1.0}, kGrid, {})));
  const Grid& pg = boosted.rho_p.grid;
  double mp = 0.0;
  for (std::size_t j = 0; j < pg.size(); ++j) mp += pg.x(j) * boosted.rho_p[j];
  CHECK(std::abs(mp * pg.spacing() - 2.0) < 1e-6);
}

TEST_CASE("series truncation is exact for polynomial potentials") {
  auto w0 = wigner_transform(init_state(GaussianState{0.5, 0.3, 0.8}, kGrid, {}));
  SUBCASE("quadratic: classical Liouville") {
    auto U = Potential::harmonic(kGrid, 1.0, 1.0);
    auto a = w0, b = w0;
    MoyalPropagator(a.grid, U, a.constants, 1e-2, 0).advance(a, 20);
    MoyalPropagator(b.grid, U, b.constants, 1e-2, 2).advance(b, 20);
    CHECK(max_abs_diff(a.values, b.values) < 1e-12);
    for (double q : quantum_force_term(w0, U, 2)) CHECK(q == 0.0);
  }
  SUBCASE("quartic: terminates at k = 1") {
    auto U = Potential::quartic(kGrid, 0.1);
    auto a = w0, b = w0;
    MoyalPropagator(a.grid, U, a.constants, 1e-2, 1).advance(a, 20);
    MoyalPropagator(b.grid, U, b.constants, 1e-2, 2).advance(b, 20);
    CHECK(max_abs_diff(a.values, b.values) < 1e-12);
  }
}

TEST_CASE("quantum force term carries no net momentum at any x") {
  auto w = wigner_transform(init_state(GaussianState{0.5, 0.3, 0.8}, kGrid, {}));
  for (auto U : {Potential::quartic(kGrid, 0.1), Potential::double_well(kGrid, 1.0, 1.0)}) {
    auto q = quantum_force_term(w, U, 2);
    const std::size_t np = w.grid.p.size();
    double scale = max_abs(q);
    CHECK(scale > 0.0);
    for (std::size_t i = 0; i < w.grid.x.size(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < np; ++j) sum += q[i * np + j];
      CHECK(std::abs(sum * w.grid.p.spacing()) < 1e-10);
    }
  }
}

TEST_CASE("moyal steps conserve the total") {
  auto w = wigner_transform(init_state(GaussianState{0.5, 0.0, 0.8}, kGrid, {}));
  auto U = Potential::double_well(kGrid, 1.0, 1.0);
  double before = w.total();
  for (int s = 0; s < 10; ++s) {
    w = moyal_step(w, U, 1e-3, 2);
    CHECK(std::abs(w.total() - before) < 1e-10);
  }
  CHECK(w.time == doctest::Approx(1e-2));
}

TEST_CASE("free evolution spreads the marginal like the packet") {
  auto w = wigner_transform(init_state(GaussianState{}, kGrid, {}));
  MoyalPropagator(w.grid, Potential::free(kGrid), w.constants, 1e-2, 0).advance(w, 50);
  auto rho = marginals(w).rho_x;
  double mxx = 0.0;
  for (std::size_t j = 0; j < kGrid.size(); ++j) mxx += kGrid.x(j) * kGrid.x(j) * rho[j];
  CHECK(std::abs(mxx * kGrid.spacing() - 1.0625) < 1e-5);
}

TEST_CASE("cross-check against split-step evolution") {
  auto s = init_state(GaussianState{0.5, 0.3, 0.8}, kGrid, {});
  CHECK(crosscheck(s, Potential::free(kGrid), 0.5, 1e-2, 0) < 1e-6);
  CHECK(crosscheck(s, Potential::free(kGrid), 0.5, 1e-2, 2) < 1e-6);
  auto coherent = init_state(GaussianState{2.0, 0.0, std::sqrt(0.5)}, kGrid, {});
  CHECK(crosscheck(coherent, Potential::harmonic(kGrid, 1.0, 1.0), 1.0, 1e-3, 0) < 1e-4);
}

TEST_CASE("unsupported truncation orders and steps are rejected") {
  auto ps = PhaseSpaceGrid::conjugate_to(kGrid, 1.0);
  auto U = Potential::quartic(kGrid, 0.1);
  CHECK_THROWS_AS(MoyalPropagator(ps, U, {}, 1e-3, 3), DomainError);
  CHECK_THROWS_AS(MoyalPropagator(ps, U, {}, 1e-3, -1), DomainError);
  CHECK_THROWS_AS(MoyalPropagator(ps, U, {}, 0.5, 1), DomainError);
  CHECK_THROWS_AS(MoyalPropagator(ps, U, {}, 0.0, 1), DomainError);
}

}
