#include "qres/pauli.hpp"

#include <cmath>

#include "qres/error.hpp"

namespace qres {

bool is_finite(Complex z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

Vec3C operator+(const Vec3C& a, const Vec3C& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3C operator-(const Vec3C& a, const Vec3C& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3C operator-(const Vec3C& a) { return {-a.x, -a.y, -a.z}; }
Vec3C operator*(Complex s, const Vec3C& a) { return {s * a.x, s * a.y, s * a.z}; }
Vec3C operator*(const Vec3C& a, Complex s) { return s * a; }
Vec3C operator/(const Vec3C& a, Complex s) { return {a.x / s, a.y / s, a.z / s}; }

Complex dot(const Vec3C& a, const Vec3C& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

double norm2(const Vec3C& a) { return std::norm(a.x) + std::norm(a.y) + std::norm(a.z); }

Vec3C cross(const Vec3C& a, const Vec3C& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

Operator2::Operator2(Complex m00, Complex m01, Complex m10, Complex m11) : m_{m00, m01, m10, m11} {
  for (const auto& z : m_) {
    if (!is_finite(z)) throw InvalidArgument("Operator2: non-finite entry");
  }
}

Operator2 Operator2::identity() { return diag(1.0, 1.0); }
Operator2 Operator2::zero() { return Operator2{}; }

Operator2 Operator2::diag(Complex d0, Complex d1) {
  Operator2 m;
  m.m_ = {d0, 0.0, 0.0, d1};
  return m;
}

Operator2 Operator2::adjoint() const {
  Operator2 r;
  r.m_ = {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
  return r;
}

Complex Operator2::trace() const { return m_[0] + m_[3]; }
Complex Operator2::det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

double Operator2::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : m_) s += std::norm(z);
  return std::sqrt(s);
}

bool Operator2::is_unitary(double tol) const {
  return max_abs_diff((*this) * adjoint(), identity()) <= tol;
}

Operator2 operator*(const Operator2& a, const Operator2& b) {
  Operator2 r;
  r.m_ = {a.m_[0] * b.m_[0] + a.m_[1] * b.m_[2], a.m_[0] * b.m_[1] + a.m_[1] * b.m_[3],
          a.m_[2] * b.m_[0] + a.m_[3] * b.m_[2], a.m_[2] * b.m_[1] + a.m_[3] * b.m_[3]};
  return r;
}

Operator2 operator+(const Operator2& a, const Operator2& b) {
  Operator2 r;
  for (std::size_t i = 0; i < 4; ++i) r.m_[i] = a.m_[i] + b.m_[i];
  return r;
}

Operator2 operator-(const Operator2& a, const Operator2& b) {
  Operator2 r;
  for (std::size_t i = 0; i < 4; ++i) r.m_[i] = a.m_[i] - b.m_[i];
  return r;
}

Operator2 operator*(Complex s, const Operator2& a) {
  Operator2 r;
  for (std::size_t i = 0; i < 4; ++i) r.m_[i] = s * a.m_[i];
  return r;
}

double max_abs_diff(const Operator2& a, const Operator2& b) {
  double d = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) d = std::max(d, std::abs(a(r, c) - b(r, c)));
  return d;
}

Operator2 sigma1() { return Operator2(0.0, 1.0, 1.0, 0.0); }
Operator2 sigma2() { return Operator2(0.0, -kI, kI, 0.0); }
Operator2 sigma3() { return Operator2::diag(1.0, -1.0); }

Operator2 pauli_vector(const Vec3C& n) { return Operator2(n.z, n.x - kI * n.y, n.x + kI * n.y, -n.z); }

PauliForm::PauliForm(double scale, Complex c0, Vec3C n) : scale_(scale), c0_(c0), n_(n) {
  if (!std::isfinite(scale) || scale < 0.0) throw InvalidArgument("PauliForm: scale must be finite and >= 0");
  if (!is_finite(c0) || !n.finite()) throw InvalidArgument("PauliForm: non-finite coefficient");
}

bool PauliForm::normalized(double tol) const { return std::abs(norm2(n_) - 1.0) <= tol; }

Operator2 pauli_compose(const PauliForm& p) {
  const Operator2 body = p.c0() * Operator2::identity() + pauli_vector(p.n());
  return Complex(p.scale()) * body;
}

PauliForm pauli_decompose(const Operator2& m) {
  const Complex c0 = 0.5 * (m(0, 0) + m(1, 1));
  const Vec3C n{0.5 * (m(0, 1) + m(1, 0)), 0.5 * kI * (m(0, 1) - m(1, 0)), 0.5 * (m(0, 0) - m(1, 1))};
  const double s = std::sqrt(norm2(n));
  if (s == 0.0) return PauliForm(1.0, c0, n);
  return PauliForm(s, c0 / s, n / s);
}

Operator2 exp_i_pauli(const Vec3C& x) {
  const Complex u2 = dot(x, x);
  Complex c;
  Complex sinc;
  if (std::abs(u2) < 1e-8) {
    c = 1.0 - 0.5 * u2;
    sinc = 1.0 - u2 / 6.0;
  } else {
    const Complex u = std::sqrt(u2);
    c = std::cos(u);
    sinc = std::sin(u) / u;
  }
  return c * Operator2::identity() + (kI * sinc) * pauli_vector(x);
}

Operator2 evolution(const PauliForm& h, double t) {
  const double st = h.scale() * t;
  const Complex phase = std::exp(-kI * h.c0() * st);
  return phase * exp_i_pauli(Complex(-st) * h.n());
}

Operator2 commutator(const Operator2& a, const Operator2& b) { return a * b - b * a; }

std::variant<Vec3C, Commutative> solve_sigma_a(const Vec3C& n_h, const Vec3C& n_v) {
  const Complex hh = dot(n_h, n_h);
  if (std::abs(hh) <= 1e-14 * norm2(n_h) || std::abs(hh) == 0.0) {
    throw DegenerateGenerator("solve_sigma_a: n_h . n_h vanishes");
  }
  const Complex kappa = dot(n_h, n_v) / hh;
  const Vec3C n_perp = n_v - kappa * n_h;
  if (norm2(n_perp) < 1e-20) return Commutative{};
  return cross(n_h, n_perp) / hh;
}

}  // namespace qres
