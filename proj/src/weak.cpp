#include "qres/weak.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qres/diagnostics.hpp"
#include "qres/error.hpp"

namespace qres {
namespace {

// Stay probabilities below this are treated as an exact resonance zero,
// i.e. |amplitude| < 1e-12.
constexpr double kResonanceZero = 1e-24;

Complex matrix_element(const SpinState& post, const Operator2& m, const SpinState& pre) {
  return inner(post, m * pre);
}

void guard_strength(const char* what, double delta) {
  if (std::abs(delta) > 0.1) {
    warn(std::string(what) + ": measurement strength " + std::to_string(delta) +
         " exceeds 0.1; the first-order expansion may be inaccurate");
  }
}

}  // namespace

SplitKind WeakContext::classify() const {
  const Vec3C& nh = H0.n();
  const Vec3C& nv = V.n();
  if (std::sqrt(norm2(cross(nh, nv))) <= 1e-12) return SplitKind::commutative;
  if (std::abs(dot(nh, nv)) <= 1e-12) return SplitKind::noncommutative;
  return SplitKind::mixed;
}

Complex WeakContext::kappa() const {
  const Complex hh = dot(H0.n(), H0.n());
  if (std::abs(hh) == 0.0) throw DegenerateGenerator("WeakContext: n_h . n_h vanishes");
  return dot(H0.n(), V.n()) / hh;
}

void WeakContext::validate() const {
  std::vector<std::string> errs;
  if (!(H0.scale() > 0.0)) errs.emplace_back("H0.scale must be > 0");
  if (!std::isfinite(t)) errs.emplace_back("t must be finite");
  if (!errs.empty()) throw InvalidConfig(errs);
}

WeakValues weak_values(const WeakContext& ctx, const SelectionPair& sel) {
  ctx.validate();
  const Operator2 u = evolution(ctx.H0, ctx.t);
  WeakValues w;
  w.overlap = matrix_element(sel.post, u, sel.pre);
  if (std::abs(w.overlap) <= 1e-300) throw DivergedOverlap(w.overlap);

  w.sigma_h_w = matrix_element(sel.post, pauli_vector(ctx.H0.n()) * u, sel.pre) / w.overlap;
  const auto sa = solve_sigma_a(ctx.H0.n(), ctx.V.n());
  if (std::holds_alternative<Commutative>(sa)) {
    w.commutative = true;
    w.sigma_aL_w = matrix_element(sel.post, pauli_vector(ctx.V.n()) * u, sel.pre) / w.overlap;
    w.sigma_aR_w = w.sigma_aL_w;
  } else {
    const Operator2 s_a = pauli_vector(std::get<Vec3C>(sa));
    w.sigma_aL_w = matrix_element(sel.post, s_a * u, sel.pre) / w.overlap;
    w.sigma_aR_w = matrix_element(sel.post, u * s_a, sel.pre) / w.overlap;
  }
  return w;
}

Complex first_order_amplitude(const WeakContext& ctx, const SelectionPair& sel) {
  const WeakValues w = weak_values(ctx, sel);
  const double h = ctx.H0.scale();
  const double v = ctx.V.scale();
  const Complex bracket =
      1.0 - kI * v * ctx.t * ctx.kappa() * w.sigma_h_w - kI * (v / (2.0 * h)) * (w.sigma_aL_w - w.sigma_aR_w);
  return w.overlap * bracket * std::exp(-kI * v * ctx.V.c0() * ctx.t);
}

double first_order_probability(const WeakContext& ctx, const SelectionPair& sel) {
  const WeakValues w = weak_values(ctx, sel);
  const double h = ctx.H0.scale();
  const double v = ctx.V.scale();
  const double vt = v * ctx.t;
  const Complex kappa = ctx.kappa();
  const double pr0 = std::norm(w.overlap);
  const double bracket = 1.0 + 2.0 * vt * (kappa.imag() * w.sigma_h_w.real() + kappa.real() * w.sigma_h_w.imag()) +
                         (v / h) * (w.sigma_aL_w.imag() - w.sigma_aR_w.imag());
  return pr0 * std::exp(2.0 * vt * ctx.V.c0().imag()) * bracket;
}

double exact_probability(const WeakContext& ctx, const SelectionPair& sel) {
  const Operator2 total = pauli_compose(ctx.H0) + pauli_compose(ctx.V);
  const Operator2 u = evolution(pauli_decompose(total), ctx.t);
  return std::norm(matrix_element(sel.post, u, sel.pre));
}

double extract_im_weak_fd(const std::function<double(double)>& prob_at, ExtractionMode mode) {
  const double pr0 = prob_at(0.0);
  if (!(pr0 >= 1e-14)) throw ZeroBaseProbability("extract_im_weak_fd: Pr(0) below 1e-14");
  constexpr double h = 1e-4;
  const auto central = [&](double step) { return (prob_at(step) - prob_at(-step)) / (2.0 * step); };
  const double slope = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  return mode == ExtractionMode::commutative ? slope / (2.0 * pr0) : slope / pr0;
}

PhaseParams rabi_phases(const RabiSpec& spec, double t) {
  spec.validate();
  PhaseParams p;
  p.phi_rabi = (spec.omega - spec.omega0_bar()) / (2.0 * spec.omega1);
  p.delta_rabi = spec.epsilon / spec.omega1;
  p.pulse_area = spec.omega1 * t;
  return p;
}

PhaseParams ramsey_phases(const RamseySpec& spec) {
  spec.validate();
  PhaseParams p;
  p.phi_ramsey = 0.5 * (spec.omega - spec.omega0_bar()) * spec.T;
  p.delta_ramsey = spec.epsilon * spec.T;
  p.pulse_area = spec.omega2 * spec.tau;
  return p;
}

double resonance_stay_probability(double phi, double pulse_area) {
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  const double ca = std::cos(pulse_area);
  return s * s + ca * ca * c * c;
}

double rabi_weak_value_im(double phi, double pulse_area) {
  // -cot(phi) s^2 tan^2 A/(1 + s^2 tan^2 A) == -sin(phi)cos(phi)sin^2 A / Pr(0)
  const double pr0 = resonance_stay_probability(phi, pulse_area);
  if (pr0 < kResonanceZero) throw Diverged("rabi_weak_value_im: weak value diverges at the resonance zero");
  const double sa = std::sin(pulse_area);
  return -std::sin(phi) * std::cos(phi) * sa * sa / pr0;
}

std::pair<Complex, Complex> rabi_weak_values_direct(double phi, double pulse_area) {
  const SpinState psi = exp_i_pauli(Vec3C::real(0.0, -0.5 * phi, 0.0)) * SpinState::plus();
  const Operator2 u = exp_i_pauli(Vec3C::real(-pulse_area, 0.0, 0.0));
  const Complex overlap = matrix_element(psi, u, psi);
  if (std::abs(overlap) <= 1e-300) throw DivergedOverlap(overlap);
  const Operator2 s2 = sigma2();
  return {matrix_element(psi, s2 * u, psi) / overlap, matrix_element(psi, u * s2, psi) / overlap};
}

double first_order_stay_probability(double phi, double pulse_area, double delta) {
  const double sa = std::sin(pulse_area);
  return resonance_stay_probability(phi, pulse_area) - delta * std::sin(phi) * std::cos(phi) * sa * sa;
}

double rabi_prob_first_order(double phi, double pulse_area, double delta) {
  guard_strength("rabi_prob_first_order", delta);
  return first_order_stay_probability(phi, pulse_area, delta);
}

double shifted_stay_probability(double phi, double pulse_area, double delta) {
  return resonance_stay_probability(phi - 0.5 * delta, pulse_area);
}

Complex ramsey_weak_value(double phi, double pulse_area) {
  const double c = std::cos(0.5 * pulse_area);
  const double s = std::sin(0.5 * pulse_area);
  const Complex a = c * c * std::polar(1.0, -phi);
  const Complex b = s * s * std::polar(1.0, phi);
  const Complex den = a - b;
  if (std::norm(den) < kResonanceZero) throw Diverged("ramsey_weak_value: weak value diverges at the resonance zero");
  return (a + b) / den;
}

double ramsey_prob_first_order(double phi, double pulse_area, double delta) {
  guard_strength("ramsey_prob_first_order", delta);
  return first_order_stay_probability(phi, pulse_area, delta);
}

std::pair<Complex, Complex> ill_equivalence(double alpha, double beta) {
  const SpinState pre = exp_i_pauli(Vec3C::real(0.0, -0.25 * std::numbers::pi, 0.0)) * SpinState::plus();
  const SpinState post = exp_i_pauli(Vec3C::real(0.0, 0.0, -0.5 * alpha)) *
                         (exp_i_pauli(Vec3C::real(0.0, -0.5 * beta, 0.0)) * SpinState::plus());
  const Complex overlap = inner(post, pre);
  if (std::norm(overlap) < kResonanceZero) throw DivergedOverlap(overlap);
  const Complex interferometric = inner(post, sigma3() * pre) / overlap;
  return {interferometric, ramsey_weak_value(-0.5 * alpha, 0.5 * std::numbers::pi)};
}

}  // namespace qres
