#include <doctest.h>

#include <cmath>
#include <vector>

#include "qhydro/analysis.hpp"
#include "qhydro/schrodinger.hpp"

using namespace qhydro;

namespace {

const Grid kGrid(512, 40.0, -20.0);

std::vector<TraceSample> evolve_trace(WaveField state, const Potential& U, double dt,
                                      std::size_t n_steps) {
  SplitStepPropagator prop(U, state.constants, dt, StepOptions{1.0});
  std::vector<TraceSample> trace{sample_trace(state, U)};
  for (std::size_t s = 0; s < n_steps; ++s) {
    prop.advance(state);
    trace.push_back(sample_trace(state, U));
  }
  return trace;
}

}  // namespace

TEST_SUITE("schrodinger") {

TEST_CASE("initial states") {
  PhysicalConstants c;
  auto g = init_state(GaussianState{0.0, 0.0, 1.0}, kGrid, c);
  CHECK(std::abs(observables(g, Potential::free(kGrid)).norm - 1.0) < 1e-12);

  auto ground = init_state(HarmonicEigenstate{1.0, 0}, kGrid, c);
  CHECK(std::abs(observables(ground, Potential::harmonic(kGrid, 1.0, 1.0)).var_x - 0.5) < 1e-8);

  auto boosted = init_state(GaussianState{0.0, 2.0, 1.0}, kGrid, c);
  CHECK(std::abs(observables(boosted, Potential::free(kGrid)).mean_p - 2.0) < 1e-8);
}

TEST_CASE("states that do not fit the box are rejected") {
  CHECK_THROWS_AS(init_state(GaussianState{15.0, 0.0, 1.0}, kGrid, {}), DomainError);
  CHECK_THROWS_AS(init_state(GaussianState{0.0, 0.0, -1.0}, kGrid, {}), DomainError);
}

TEST_CASE("observables of simple states") {
  auto U = Potential::harmonic(kGrid, 1.0, 1.0);
  auto centred = observables(init_state(GaussianState{0.0, 0.0, 1.0}, kGrid, {}), U);
  CHECK(std::abs(centred.mean_x) < 1e-10);
  CHECK(std::abs(centred.mean_p) < 1e-10);

  auto ground = observables(init_state(HarmonicEigenstate{1.0, 0}, kGrid, {}), U);
  CHECK(std::abs(ground.energy - 0.5) < 1e-8);

  auto shifted = observables(init_state(GaussianState{1.5, 0.0, 1.0}, kGrid, {}), U);
  CHECK(std::abs(shifted.mean_x - 1.5) < 1e-8);
}

TEST_CASE("free packet spreads as sigma0^2 + (t / 2 sigma0)^2") {
  auto U = Potential::free(kGrid);
  auto s = init_state(GaussianState{0.0, 0.0, 1.0}, kGrid, {});
  SplitStepPropagator(U, s.constants, 1e-3).advance(s, 1000);
  CHECK(std::abs(observables(s, U).var_x - 1.25) < 1e-6);
}

TEST_CASE("ground state returns to itself") {
  auto U = Potential::harmonic(kGrid, 1.0, 1.0);
  auto s0 = init_state(HarmonicEigenstate{1.0, 0}, kGrid, {});
  auto s = s0;
  SplitStepPropagator(U, s.constants, 1e-3).advance(s, 5000);
  CHECK(std::abs(overlap_probability(s, s0) - 1.0) < 1e-8);
}

TEST_CASE("propagator eigenstate keeps its modulus exactly") {
  const double dt = 1e-2;
  auto U = Potential::harmonic(kGrid, 1.0, 1.0);
  auto s0 = init_state(HarmonicEigenstate{1.0, 0, 0.0, dt}, kGrid, {});
  auto s = s0;
  SplitStepPropagator(U, s.constants, dt, StepOptions{4.0}).advance(s, 500);
  double worst = 0.0;
  for (std::size_t j = 0; j < kGrid.size(); ++j)
    worst = std::max(worst, std::abs(std::abs(s.psi[j]) - std::abs(s0.psi[j])));
  CHECK(worst < 1e-12);
}

TEST_CASE("one step is unitary") {
  auto U = Potential::quartic(kGrid, 0.1);
  auto s = init_state(GaussianState{1.0, 0.5, 0.7}, kGrid, {});
  double n0 = observables(s, U).norm;
  auto s1 = step(s, U, 1e-3);
  CHECK(std::abs(observables(s1, U).norm - n0) < 1e-13);
  CHECK(s1.time == doctest::Approx(1e-3));
}

TEST_CASE("steps beyond the stability bound are rejected") {
  auto U = Potential::free(kGrid);
  auto s = init_state(GaussianState{}, kGrid, {});
  const double bound = 0.5 * kGrid.spacing() * kGrid.spacing();
  CHECK_THROWS_AS(step(s, U, 1.01 * bound), DomainError);
  CHECK_NOTHROW(step(s, U, 0.99 * bound));
  CHECK_NOTHROW(step(s, U, 2.0 * bound, StepOptions{4.0}));
}

TEST_CASE("Ehrenfest identities") {
  SUBCASE("free packet") {
    auto U = Potential::free(kGrid);
    auto trace = evolve_trace(init_state(GaussianState{0.0, 1.0, 1.0}, kGrid, {}), U, 1e-3, 200);
    auto r = ehrenfest_residual(trace, 1.0);
    CHECK(r.r1 < 1e-6);
    CHECK(r.r2 < 1e-6);
  }
  SUBCASE("coherent state in a harmonic well") {
    auto U = Potential::harmonic(kGrid, 1.0, 1.0);
    auto trace = evolve_trace(init_state(GaussianState{2.0, 0.0, std::sqrt(0.5)}, kGrid, {}), U, 1e-3, 1000);
    auto r = ehrenfest_residual(trace, 1.0);
    CHECK(r.r1 < 1e-5);
    CHECK(r.r2 < 1e-5);
    // <x>(t) = x0 cos t
    CHECK(std::abs(trace.back().obs.mean_x - 2.0 * std::cos(1.0)) < 1e-5);
  }
  SUBCASE("quartic packet") {
    auto U = Potential::quartic(kGrid, 0.1);
    auto trace = evolve_trace(init_state(GaussianState{1.0, 0.0, 1.0}, kGrid, {}), U, 1e-3, 1000);
    auto r = ehrenfest_residual(trace, 1.0);
    CHECK(r.r1 < 1e-4);
    CHECK(r.r2 < 1e-4);
  }
}

TEST_CASE("energy and norm over 10^4 harmonic steps") {
  auto U = Potential::harmonic(kGrid, 1.0, 1.0);
  auto s = init_state(GaussianState{1.0, 0.5, 1.0}, kGrid, {});
  auto o0 = observables(s, U);
  SplitStepPropagator(U, s.constants, 1e-3).advance(s, 10000);
  auto o1 = observables(s, U);
  CHECK(std::abs(o1.norm - o0.norm) < 1e-9);
  CHECK(std::abs(o1.energy - o0.energy) / o0.energy < 1e-7);
}

TEST_CASE("Strang splitting converges at second order") {
  // The free packet is propagated exactly by the kinetic step, so the
  // refinement study uses an anharmonic packet against a fine reference.
  auto U = Potential::quartic(kGrid, 0.1);
  auto s0 = init_state(GaussianState{1.0, 0.5, 1.0}, kGrid, {});
  auto var_at_one = [&](double dt) {
    auto s = s0;
    SplitStepPropagator(U, s.constants, dt, StepOptions{1.0}).advance(s, std::lround(1.0 / dt));
    return observables(s, U).var_x;
  };
  const double reference = var_at_one(1.25e-4);
  std::vector<double> steps{4e-3, 2e-3, 1e-3}, errors;
  for (double dt : steps) errors.push_back(std::abs(var_at_one(dt) - reference));
  CHECK(convergence_order(errors, steps) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("two-particle propagation conserves the norm") {
  Grid a(64, 30.0, -15.0);
  Grid2D g{a, a};
  auto U = Potential::harmonic(a, 1.0, 1.0);
  auto s = init_state(SymmetrizedPairState{2.0, 1.0}, g, {});
  auto norm = [](const WaveField2D& w) {
    double sum = 0.0;
    for (auto v : w.psi.values) sum += std::norm(v);
    return sum * w.grid().axis1.spacing() * w.grid().axis2.spacing();
  };
  double n0 = norm(s);
  SplitStepPropagator2D(U, g, s.constants, 1e-2).advance(s, 100);
  CHECK(std::abs(norm(s) - n0) < 1e-12);
  CHECK(s.time == doctest::Approx(1.0));
}

}
