#ifndef QRES_WEAK_HPP
#define QRES_WEAK_HPP

// Direct weak measurement on a two-level transition.
//
// H = H0 + V with H0 = h (n0_h + n_h . sigma) and V = v (n0_v + n_v . sigma).
// To first order in v the post-selected amplitude is
//   <f|e^{-iHt}|i> ~ e^{-i v n0_v t} <f|e^{-iH0 t}|i>
//                    (1 - i v t kappa s_h^W - i (v/2h)(s_aL^W - s_aR^W)),
// kappa = (n_h . n_v)/(n_h . n_h). s_a solves [s_a, s_h] = 2i(s_v - kappa s_h).
//
// The Rabi and Ramsey closed forms below are functions of the detuning
// phase phi and the pulse area (w1 t or w2 tau) only.

#include <functional>
#include <utility>

#include "qres/dynamics.hpp"
#include "qres/pauli.hpp"

namespace qres {

enum class SplitKind { commutative, noncommutative, mixed };

struct WeakContext {
  PauliForm H0;  ///< dominant part; scale h > 0
  PauliForm V;   ///< perturbation; scale v >= 0
  double t = 0.0;

  /// commutative: n_h x n_v = 0; noncommutative: n_h . n_v = 0; else mixed.
  /// Threshold 1e-12 on the Hermitian norms.
  SplitKind classify() const;
  /// kappa = (n_h . n_v)/(n_h . n_h)
  Complex kappa() const;
  void validate() const;
};

struct SelectionPair {
  SpinState pre;
  SpinState post;
};

struct WeakValues {
  Complex sigma_h_w{};
  Complex sigma_aL_w{};
  Complex sigma_aR_w{};
  /// <f|e^{-iH0 t}|i>
  Complex overlap{};
  /// When set, sigma_aL_w == sigma_aR_w hold the commutative weak value s_v^W.
  bool commutative = false;
};

/// Throws DivergedOverlap when |<f|e^{-iH0 t}|i>| <= 1e-300.
WeakValues weak_values(const WeakContext& ctx, const SelectionPair& sel);

Complex first_order_amplitude(const WeakContext& ctx, const SelectionPair& sel);

/// Pr(0) e^{2vt Im n0_v} [1 + 2vt (Im kappa Re s_h^W + Re kappa Im s_h^W)
///                          + (v/h)(Im s_aL^W - Im s_aR^W)]
double first_order_probability(const WeakContext& ctx, const SelectionPair& sel);

/// |<f|e^{-i(H0+V)t}|i>|^2, the exact counterpart of first_order_probability.
double exact_probability(const WeakContext& ctx, const SelectionPair& sel);

enum class ExtractionMode {
  commutative,     ///< prob_at(vt); returns (1/(2 Pr0)) dPr/d(vt)
  noncommutative,  ///< prob_at(v/h) or prob_at(delta); returns (1/Pr0) dPr/dx
};

/// Central differences at steps 1e-4 and 5e-5 combined by Richardson
/// extrapolation. Throws ZeroBaseProbability when prob_at(0) < 1e-14.
double extract_im_weak_fd(const std::function<double(double)>& prob_at, ExtractionMode mode);

/// Rabi detuning phase (w - w0_bar)/(2 w1) and Ramsey phase (w - w0_bar) T/2.
struct PhaseParams {
  double phi_rabi = 0.0;
  double phi_ramsey = 0.0;
  double delta_rabi = 0.0;    ///< epsilon / w1
  double delta_ramsey = 0.0;  ///< epsilon T
  double pulse_area = 0.0;
};

PhaseParams rabi_phases(const RabiSpec& spec, double t);
PhaseParams ramsey_phases(const RamseySpec& spec);

/// Pr(+ -> +) at zero disturbance: sin^2 phi (1 + cos^2(A) cot^2 phi),
/// evaluated as sin^2 phi + cos^2 A cos^2 phi.
double resonance_stay_probability(double phi, double pulse_area);

/// Im s_{2,L}^W = -cot phi sin^2 phi tan^2 A / (1 + sin^2 phi tan^2 A).
/// Throws Diverged where the stay probability vanishes (phi = 0 mod pi at
/// A = pi/2, to within 1e-24).
double rabi_weak_value_im(double phi, double pulse_area);

/// (s_{2,L}^W, s_{2,R}^W) from their defining matrix elements between
/// e^{-i phi s2/2}|+> states around e^{-i A s1}.
std::pair<Complex, Complex> rabi_weak_values_direct(double phi, double pulse_area);

/// Pr(0)(1 + delta Im s_{2,L}^W), written as Pr(0) - delta sin(phi)cos(phi)sin^2(A)
/// so it stays finite on resonance. No validity guard.
double first_order_stay_probability(double phi, double pulse_area, double delta);

/// first_order_stay_probability with delta = epsilon/w1. Warns when |delta| > 0.1.
double rabi_prob_first_order(double phi, double pulse_area, double delta);

/// The stay probability with the disturbance absorbed into the phase,
/// Pr(0) evaluated at phi - delta/2.
double shifted_stay_probability(double phi, double pulse_area, double delta);

/// Ramsey weak value of s3:
/// (c^2 e^{-i phi} + s^2 e^{i phi}) / (c^2 e^{-i phi} - s^2 e^{i phi}),
/// c = cos(A/2), s = sin(A/2); equals i cot phi at A = pi/2.
Complex ramsey_weak_value(double phi, double pulse_area);

/// Same functional form as rabi_prob_first_order with delta = epsilon T.
double ramsey_prob_first_order(double phi, double pulse_area, double delta);

/// Interferometric weak value <s3>_w between e^{-i pi s2/4}|+> and
/// e^{-i alpha s3/2} e^{-i beta s2/2}|+>, paired with the Ramsey weak value
/// at phi = -alpha/2 and A = pi/2. The two agree for beta = -pi/2.
std::pair<Complex, Complex> ill_equivalence(double alpha, double beta);

}  // namespace qres

#endif  // QRES_WEAK_HPP
