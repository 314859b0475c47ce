#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qres/error.hpp"
#include "qres/pauli.hpp"
#include "support.hpp"

using namespace qres;
using qres::test::Draw;

namespace {

double levi_civita(int i, int j, int k) { return 0.5 * (i - j) * (j - k) * (k - i); }

const Operator2& basis(int i) {
  static const Operator2 s[3] = {sigma1(), sigma2(), sigma3()};
  return s[i];
}

}  // namespace

TEST_CASE("Pauli products follow s_i s_j = delta_ij + i eps_ijk s_k") {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Operator2 expected = i == j ? Operator2::identity() : Operator2::zero();
      for (int k = 0; k < 3; ++k) expected = expected + (kI * levi_civita(i, j, k)) * basis(k);
      CHECK(max_abs_diff(basis(i) * basis(j), expected) == 0.0);
    }
  }
}

TEST_CASE("pauli_vector matches the explicit Pauli sum") {
  Draw d(11);
  for (int k = 0; k < 50; ++k) {
    const Vec3C n = d.complex_vec(2.0);
    const Operator2 sum = n.x * sigma1() + n.y * sigma2() + n.z * sigma3();
    CHECK(max_abs_diff(pauli_vector(n), sum) < 1e-15);
  }
}

TEST_CASE("compose and decompose round trip") {
  Draw d(12);
  for (int k = 0; k < 200; ++k) {
    const Operator2 m(d.complex(3.0), d.complex(3.0), d.complex(3.0), d.complex(3.0));
    const PauliForm p = pauli_decompose(m);
    CHECK(p.normalized());
    CHECK(max_abs_diff(pauli_compose(p), m) < 1e-14);
  }
  const PauliForm id = pauli_decompose(Complex(2.5) * Operator2::identity());
  CHECK(id.scale() == 1.0);
  CHECK(id.c0() == Complex(2.5));
}

TEST_CASE("exp_i_pauli agrees with a 30-term power series") {
  Draw d(13);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Vec3C x = d.complex_vec(1.5);
    worst = std::max(worst, max_abs_diff(exp_i_pauli(x), qres::test::exp_series(kI * pauli_vector(x), 30)));
  }
  CHECK(worst < 1e-10);

  SUBCASE("small argument branch") {
    const Vec3C x = Vec3C::real(2e-5, -1e-5, 3e-5);
    CHECK(max_abs_diff(exp_i_pauli(x), qres::test::exp_series(kI * pauli_vector(x), 10)) < 1e-16);
  }
  SUBCASE("nilpotent generator with x . x = 0") {
    const Vec3C x{1.0, kI, 0.0};
    CHECK(dot(x, x) == Complex(0.0));
    const Operator2 expected = Operator2::identity() + kI * pauli_vector(x);
    CHECK(max_abs_diff(exp_i_pauli(x), expected) < 1e-15);
  }
  SUBCASE("real rotation angle") {
    const double th = 0.7;
    const Operator2 u = exp_i_pauli(Vec3C::real(0.0, 0.0, th));
    CHECK(std::abs(u(0, 0) - std::polar(1.0, th)) < 1e-15);
    CHECK(std::abs(u(1, 1) - std::polar(1.0, -th)) < 1e-15);
  }
}

TEST_CASE("evolution of a Hermitian generator is unitary with the expected determinant") {
  Draw d(14);
  for (int k = 0; k < 100; ++k) {
    const Vec3C n = d.real_vec(1.0);
    const double s = d.uniform(0.1, 2.0);
    const double c0 = d.uniform(-1.0, 1.0);
    const double t = d.uniform(0.0, 1.5);
    const PauliForm h(s, c0, n);
    const Operator2 u = evolution(h, t);
    CHECK(u.is_unitary());
    // det e^{-iHt} = e^{-i tr(H) t} for traceless n . sigma plus c0
    CHECK(std::abs(u.det() - std::exp(-2.0 * kI * s * c0 * t)) < 1e-12);
    CHECK(max_abs_diff(u, qres::test::exp_series(Complex(0.0, -t) * pauli_compose(h), 60)) < 1e-9);
  }
}

TEST_CASE("solve_sigma_a satisfies its defining commutator") {
  Draw d(15);
  for (int k = 0; k < 300; ++k) {
    const Vec3C nh = k % 2 == 0 ? d.real_vec(1.0) : d.complex_vec(1.0);
    const Vec3C nv = k % 3 == 0 ? d.real_vec(1.0) : d.complex_vec(1.0);
    const auto sol = solve_sigma_a(nh, nv);
    REQUIRE(std::holds_alternative<Vec3C>(sol));
    const Complex kappa = dot(nh, nv) / dot(nh, nh);
    const Operator2 lhs = commutator(pauli_vector(std::get<Vec3C>(sol)), pauli_vector(nh));
    const Operator2 rhs = (2.0 * kI) * pauli_vector(nv - kappa * nh);
    CHECK(max_abs_diff(lhs, rhs) < 1e-10 * std::max(1.0, rhs.frobenius_norm()));
  }
}

TEST_CASE("solve_sigma_a edge cases") {
  CHECK(std::holds_alternative<Commutative>(solve_sigma_a(Vec3C::real(0, 0, 1), Vec3C::real(0, 0, -3))));
  CHECK_THROWS_AS(solve_sigma_a(Vec3C::real(0, 0, 0), Vec3C::real(1, 0, 0)), DegenerateGenerator);
  // null vector: n . n = 0 although n != 0
  CHECK_THROWS_AS(solve_sigma_a(Vec3C{1.0, kI, 0.0}, Vec3C::real(0, 0, 1)), DegenerateGenerator);
}

TEST_CASE("constructors reject non-finite input") {
  const double nan = std::nan("");
  CHECK_THROWS_AS(Operator2(nan, 0.0, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(PauliForm(-1.0, 0.0, Vec3C::real(0, 0, 1)), InvalidArgument);
  CHECK_THROWS_AS(PauliForm(1.0, nan, Vec3C::real(0, 0, 1)), InvalidArgument);
  CHECK_THROWS_AS(PauliForm(1.0, 0.0, Vec3C::real(nan, 0, 1)), InvalidArgument);
}

TEST_CASE("operator helpers") {
  const Operator2 m(1.0, 2.0 * kI, 3.0, 4.0);
  CHECK(m.trace() == Complex(5.0));
  CHECK(m.det() == Complex(4.0) - 6.0 * kI);
  CHECK(m.adjoint()(0, 1) == Complex(3.0));
  CHECK(m.adjoint()(1, 0) == -2.0 * kI);
  CHECK(std::abs(m.frobenius_norm() - std::sqrt(30.0)) < 1e-15);
  CHECK_FALSE(m.is_unitary());
  CHECK(max_abs_diff(commutator(sigma1(), sigma2()), (2.0 * kI) * sigma3()) == 0.0);
  CHECK(norm2(Vec3C{1.0, kI, 0.0}) == 2.0);
  const Vec3C c = cross(Vec3C::real(1, 0, 0), Vec3C::real(0, 1, 0));
  CHECK(c.z == Complex(1.0));
}
