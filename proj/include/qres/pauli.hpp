#ifndef QRES_PAULI_HPP
#define QRES_PAULI_HPP

// Complex 2x2 operator algebra over the Pauli basis {1, s1, s2, s3}.
//
// Every operator is written as scale * (c0 * 1 + n . sigma). Generators may be
// non-Hermitian (complex n), so the "square" of a vector is the bilinear
// n . n without conjugation, while normalization uses the Hermitian n . n*.

#include <array>
#include <complex>
#include <variant>

namespace qres {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

bool is_finite(Complex z) noexcept;

struct Vec3C {
  Complex x{};
  Complex y{};
  Complex z{};

  static Vec3C real(double x, double y, double z) { return {Complex(x), Complex(y), Complex(z)}; }

  Complex& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  const Complex& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  bool finite() const noexcept { return is_finite(x) && is_finite(y) && is_finite(z); }
};

Vec3C operator+(const Vec3C& a, const Vec3C& b);
Vec3C operator-(const Vec3C& a, const Vec3C& b);
Vec3C operator-(const Vec3C& a);
Vec3C operator*(Complex s, const Vec3C& a);
Vec3C operator*(const Vec3C& a, Complex s);
Vec3C operator/(const Vec3C& a, Complex s);

/// Bilinear product a . b (no conjugation).
Complex dot(const Vec3C& a, const Vec3C& b);
/// Hermitian squared norm a . a*.
double norm2(const Vec3C& a);
/// Formal cross product, valid for complex components.
Vec3C cross(const Vec3C& a, const Vec3C& b);

/// Dense 2x2 complex matrix, row-major.
class Operator2 {
 public:
  Operator2() = default;
  /// Throws InvalidArgument on non-finite entries.
  Operator2(Complex m00, Complex m01, Complex m10, Complex m11);

  static Operator2 identity();
  static Operator2 zero();
  static Operator2 diag(Complex d0, Complex d1);

  Complex operator()(int r, int c) const { return m_[static_cast<std::size_t>(2 * r + c)]; }
  Complex& at(int r, int c) { return m_[static_cast<std::size_t>(2 * r + c)]; }

  Operator2 adjoint() const;
  Complex trace() const;
  Complex det() const;
  double frobenius_norm() const;
  bool is_unitary(double tol = 1e-12) const;

  friend Operator2 operator*(const Operator2& a, const Operator2& b);
  friend Operator2 operator+(const Operator2& a, const Operator2& b);
  friend Operator2 operator-(const Operator2& a, const Operator2& b);
  friend Operator2 operator*(Complex s, const Operator2& a);

 private:
  std::array<Complex, 4> m_{};
};

/// Largest entrywise modulus of a - b.
double max_abs_diff(const Operator2& a, const Operator2& b);

Operator2 sigma1();
Operator2 sigma2();
Operator2 sigma3();
/// n . sigma as a dense matrix.
Operator2 pauli_vector(const Vec3C& n);

/// scale * (c0 * 1 + n . sigma). Scale is a non-negative angular frequency.
class PauliForm {
 public:
  PauliForm() = default;
  /// Throws InvalidArgument for negative or non-finite scale or non-finite coefficients.
  PauliForm(double scale, Complex c0, Vec3C n);

  double scale() const noexcept { return scale_; }
  Complex c0() const noexcept { return c0_; }
  const Vec3C& n() const noexcept { return n_; }

  /// n . n* == 1 within tol.
  bool normalized(double tol = 1e-12) const;

 private:
  double scale_ = 0.0;
  Complex c0_{};
  Vec3C n_{};
};

Operator2 pauli_compose(const PauliForm& p);

/// Inverse of pauli_compose. The scale is the Hermitian norm of the traceless
/// part, or 1 when that part vanishes.
PauliForm pauli_decompose(const Operator2& m);

/// exp(i x . sigma) = cos u + i (x . sigma) sin(u)/u with u^2 = x . x (bilinear).
/// Below |u^2| < 1e-8 the second-order series is used for cos u and sin(u)/u.
Operator2 exp_i_pauli(const Vec3C& x);

/// exp(-i H t) for H = scale (c0 + n . sigma).
Operator2 evolution(const PauliForm& h, double t);

Operator2 commutator(const Operator2& a, const Operator2& b);

/// Tag returned by solve_sigma_a when n_v is parallel to n_h.
struct Commutative {};

/// n_a with [n_a . sigma, n_h . sigma] = 2i (n_v - kappa n_h) . sigma,
/// kappa = (n_h . n_v)/(n_h . n_h). The free multiple of n_h is fixed to 0.
/// Throws DegenerateGenerator when n_h . n_h vanishes.
std::variant<Vec3C, Commutative> solve_sigma_a(const Vec3C& n_h, const Vec3C& n_v);

}  // namespace qres

#endif  // QRES_PAULI_HPP
