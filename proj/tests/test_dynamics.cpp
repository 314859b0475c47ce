#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qres/dynamics.hpp"
#include "qres/error.hpp"
#include "support.hpp"

using namespace qres;
using qres::test::Draw;

namespace {

constexpr double kPi = std::numbers::pi;

// Standard Rabi flip probability (w1/W)^2 sin^2(W t), W^2 = w1^2 + ((w - w0)/2)^2.
double rabi_formula(double omega0, double omega1, double omega, double t) {
  const double big = std::sqrt(omega1 * omega1 + 0.25 * (omega - omega0) * (omega - omega0));
  const double s = std::sin(big * t);
  return omega1 * omega1 / (big * big) * s * s;
}

}  // namespace

TEST_CASE("rabi_unitary matches RK4 in the lab frame") {
  Draw d(21);
  for (int k = 0; k < 6; ++k) {
    RabiSpec spec;
    spec.omega0 = d.uniform(5.0, 15.0);
    spec.omega1 = d.uniform(0.2, 2.0);
    spec.omega = spec.omega0 + d.uniform(-2.0, 2.0);
    spec.t0 = d.uniform(0.0, 1.0);
    const double t = d.uniform(0.5, 2.0);
    const SpinState psi0{Complex(0.6, 0.0), Complex(0.0, 0.8)};
    const SpinState rk = propagate_ode_oracle(RabiLab{spec.omega0, spec.omega1, spec.omega}, psi0, spec.t0,
                                              spec.t0 + t, default_step(spec.omega, spec.omega0, spec.omega1));
    CHECK(distance(rk, rabi_unitary(spec, t) * psi0) < 1e-8);
  }
}

TEST_CASE("rabi_unitary reproduces the Rabi formula and is unitary") {
  Draw d(22);
  for (int k = 0; k < 200; ++k) {
    RabiSpec spec;
    spec.omega0 = d.uniform(-10.0, 10.0);
    spec.omega1 = d.uniform(0.1, 3.0);
    spec.omega = d.uniform(-10.0, 10.0);
    spec.t0 = d.uniform(-1.0, 1.0);
    const double t = d.uniform(0.0, 4.0);
    const Operator2 u = rabi_unitary(spec, t);
    CHECK(u.is_unitary());
    const double flip = transition_probability(u, SpinState::plus(), SpinState::minus());
    CHECK(std::abs(flip - rabi_formula(spec.omega0, spec.omega1, spec.omega, t)) < 1e-12);
  }
}

TEST_CASE("resonant quarter pulse empties the initial state") {
  RabiSpec spec;
  spec.omega0 = spec.omega = 7.0;
  spec.omega1 = 0.5 * kPi;
  const Operator2 u = rabi_unitary(spec, 1.0);
  CHECK(transition_probability(u, SpinState::plus(), SpinState::plus()) <= 1e-12);
  CHECK(transition_probability(u, SpinState::minus(), SpinState::minus()) <= 1e-12);
}

TEST_CASE("piecewise Ramsey propagator matches RK4 on the lab Hamiltonian") {
  for (auto regions : {EpsilonRegions::all, EpsilonRegions::free_only}) {
    RamseySpec spec;
    spec.omega0 = 12.0;
    spec.epsilon = 0.3;
    spec.omega = 11.0;
    spec.tau = 0.4;
    spec.omega2 = 0.5 * kPi / spec.tau;
    spec.T = 1.3;
    spec.t0 = 0.25;
    spec.regions = regions;
    const SpinState psi0 = SpinState::plus();
    const double t1 = spec.t0 + spec.tau + spec.T;
    const SpinState rk = propagate_ode_oracle(PiecewiseRamsey{spec}, psi0, spec.t0, t1,
                                              default_step(spec.omega, spec.omega0, spec.omega2));
    CHECK(distance(rk, ramsey_exact_unitary(spec) * psi0) < 1e-8);
  }
}

TEST_CASE("idealized five-factor Ramsey propagator") {
  Draw d(23);
  for (int k = 0; k < 100; ++k) {
    RamseySpec spec;
    spec.omega0 = d.uniform(-5.0, 5.0);
    spec.omega = d.uniform(-5.0, 5.0);
    spec.tau = d.uniform(0.1, 1.0);
    spec.omega2 = d.uniform(0.5, 4.0);
    spec.T = d.uniform(0.0, 3.0);
    spec.t0 = d.uniform(0.0, 2.0);
    const Operator2 u = ramsey_unitary(spec);
    CHECK(u.is_unitary());
    // stay probability sin^2 phi + cos^2 A cos^2 phi with phi = (w - w0) T/2, A = w2 tau
    const double phi = 0.5 * (spec.omega - spec.omega0) * spec.T;
    const double a = spec.omega2 * spec.tau;
    const double expected = std::pow(std::sin(phi), 2) + std::pow(std::cos(a) * std::cos(phi), 2);
    CHECK(std::abs(transition_probability(u, SpinState::plus(), SpinState::plus()) - expected) < 1e-12);
  }
}

TEST_CASE("Ramsey without free precession equals a single Rabi pulse") {
  RamseySpec r;
  r.omega0 = 3.0;
  r.omega = 2.2;
  r.tau = 0.7;
  r.omega2 = 1.9;
  r.T = 0.0;
  r.t0 = 0.4;
  RabiSpec s;
  s.omega0 = r.omega0;
  s.omega = r.omega;
  s.omega1 = r.omega2;
  s.t0 = r.t0;
  CHECK(max_abs_diff(ramsey_exact_unitary(r), rabi_unitary(s, r.tau)) < 1e-13);
}

TEST_CASE("free_only regions keep the pulses at the reference frequency") {
  RamseySpec spec;
  spec.omega0 = 4.0;
  spec.epsilon = 0.5;
  spec.regions = EpsilonRegions::free_only;
  CHECK(spec.pulse_omega0() == 3.5);
  spec.regions = EpsilonRegions::all;
  CHECK(spec.pulse_omega0() == 4.0);
}

TEST_CASE("pulse sequences compose later segments on the left") {
  const PauliForm a(1.0, 0.0, Vec3C::real(1, 0, 0));
  const PauliForm b(2.0, 0.3, Vec3C::real(0, 0, 1));
  PulseSequence seq;
  seq.add(a, 0.4).add(b, 0.9);
  CHECK(seq.total_duration() == doctest::Approx(1.3));
  CHECK(max_abs_diff(seq.unitary(), evolution(b, 0.9) * evolution(a, 0.4)) < 1e-15);
  const SpinState out = propagate_pulses(seq, SpinState::plus());
  CHECK(distance(out, seq.unitary() * SpinState::plus()) < 1e-15);
  CHECK_THROWS_AS(seq.add(a, -1.0), InvalidArgument);
}

TEST_CASE("ODE oracle input checks") {
  const TimeDependentH h = StaticH{PauliForm(1.0, 0.0, Vec3C::real(0, 0, 1))};
  CHECK_THROWS_AS(propagate_ode_oracle(h, SpinState::plus(), 0.0, 1.0, 2.0), StepTooLarge);
  CHECK_THROWS_AS(propagate_ode_oracle(h, SpinState::plus(), 1.0, 1.0, 0.1), InvalidArgument);
  const SpinState psi = propagate_ode_oracle(h, SpinState::plus(), 0.0, 1.0, 1e-3);
  CHECK(std::abs(psi.up - std::exp(-kI)) < 1e-12);
}

TEST_CASE("cosine drive differs from its rotating-wave form by about w1/w") {
  const double w = 20.0;
  const SpinState psi0 = SpinState::plus();
  const double big = rwa_residual(CosineDrive{w, 0.4, w}, psi0, 5.0);
  const double small = rwa_residual(CosineDrive{w, 0.2, w}, psi0, 5.0);
  CHECK(big / small > 1.0);
  CHECK(big / small < 4.0);
  CHECK(big / (0.4 / w) > 0.5);
  CHECK(big / (0.4 / w) < 2.0);
}

TEST_CASE("rwa_residual warns outside the weak-drive regime") {
  qres::test::CaptureWarnings cap;
  rwa_residual(CosineDrive{5.0, 1.0, 5.0}, SpinState::plus(), 0.5);
  REQUIRE(cap.messages.size() == 1);
  CHECK(cap.messages[0].find("rotating wave") != std::string::npos);
}

TEST_CASE("rotating_wave keeps the co-rotating component") {
  const RabiLab r = rotating_wave(CosineDrive{3.0, 0.5, 2.0});
  CHECK(r.omega0 == 3.0);
  CHECK(r.omega1 == 0.5);
  CHECK(r.omega == 2.0);
}

TEST_CASE("perturbative probability") {
  CHECK(perturbative_probability(5.0, 0.0, 4.0, 2.0) == 0.0);
  CHECK(perturbative_probability(5.0, 0.1, 5.0, 2.0) == doctest::Approx(0.04).epsilon(1e-14));
  // agrees with the exact flip probability to O(w1^4)
  for (double w1 : {1e-2, 5e-3}) {
    const double exact = rabi_formula(5.0, w1, 4.3, 1.7);
    CHECK(std::abs(perturbative_probability(5.0, w1, 4.3, 1.7) - exact) < 10.0 * std::pow(w1, 4));
  }
}

TEST_CASE("spec validation") {
  RabiSpec r;
  r.omega1 = 0.0;
  CHECK_THROWS_AS(r.validate(), InvalidConfig);
  RamseySpec s;
  s.tau = -1.0;
  s.T = -1.0;
  try {
    s.validate();
    FAIL("expected InvalidConfig");
  } catch (const InvalidConfig& e) {
    CHECK(e.violations().size() == 2);
  }
}

TEST_CASE("default step resolves the fastest period") {
  CHECK(default_step(10.0, 20.0, 1.0) == doctest::Approx(2.0 * kPi / 20.0 / 2000.0));
}
