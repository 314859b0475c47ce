#ifndef QRES_DYNAMICS_HPP
#define QRES_DYNAMICS_HPP

// Time evolution of a driven two-level system.
//
// Conventions: hbar = 1, |+> = (1, 0), |-> = (0, 1) are the sigma_3
// eigenstates, and the static splitting term is -(omega0/2) sigma_3. The
// rotating frame is |psi'(t)> = exp(-i omega t sigma_3/2)|psi(t)>. Frame
// phases are always kept, so amplitudes (not just probabilities) are exact.

#include <variant>
#include <vector>

#include "qres/pauli.hpp"

namespace qres {

struct SpinState {
  Complex up{1.0};
  Complex down{0.0};

  static SpinState plus() { return {1.0, 0.0}; }
  static SpinState minus() { return {0.0, 1.0}; }

  double norm2() const { return std::norm(up) + std::norm(down); }
  bool is_normalized(double tol = 1e-12) const { return std::abs(norm2() - 1.0) <= tol; }
};

SpinState operator*(const Operator2& m, const SpinState& s);
/// <a|b>
Complex inner(const SpinState& a, const SpinState& b);
/// Euclidean distance || a - b ||.
double distance(const SpinState& a, const SpinState& b);

/// Rabi drive -(omega0/2) s3 + omega1 (cos wt s1 - sin wt s2), omega0 = omega0_bar + epsilon.
struct RabiSpec {
  double omega0 = 0.0;
  double omega1 = 1.0;
  double omega = 0.0;
  double t0 = 0.0;
  double epsilon = 0.0;

  double omega0_bar() const { return omega0 - epsilon; }
  /// Throws InvalidConfig unless omega1 > 0 and all fields are finite.
  void validate() const;
};

/// Where the disturbance epsilon acts in a Ramsey sequence.
enum class EpsilonRegions {
  all,        ///< omega0 (true frequency) in pulses and free precession
  free_only,  ///< pulses see omega0_bar, free precession sees omega0
};

/// Two pulses of length tau/2 separated by free precession T.
struct RamseySpec {
  double omega0 = 0.0;
  double omega2 = 1.0;
  double omega = 0.0;
  double tau = 1.0;
  double T = 0.0;
  double t0 = 0.0;
  double epsilon = 0.0;
  EpsilonRegions regions = EpsilonRegions::all;

  double omega0_bar() const { return omega0 - epsilon; }
  double pulse_omega0() const { return regions == EpsilonRegions::all ? omega0 : omega0_bar(); }
  void validate() const;
};

struct PulseSegment {
  PauliForm generator;
  double duration = 0.0;
};

/// Ordered list of time-independent segments; the first segment acts first.
class PulseSequence {
 public:
  PulseSequence() = default;
  explicit PulseSequence(std::vector<PulseSegment> segments);

  /// Throws InvalidArgument for a negative or non-finite duration.
  PulseSequence& add(const PauliForm& generator, double duration);

  const std::vector<PulseSegment>& segments() const noexcept { return segments_; }
  double total_duration() const;
  /// prod_k exp(-i H_k dt_k), later segments on the left.
  Operator2 unitary() const;

 private:
  std::vector<PulseSegment> segments_;
};

/// Static generator.
struct StaticH {
  PauliForm h;
};
/// Lab-frame circularly rotating drive (the Rabi Hamiltonian).
struct RabiLab {
  double omega0 = 0.0;
  double omega1 = 0.0;
  double omega = 0.0;
};
/// Linearly polarized drive -(omega0/2) s3 + 2 omega1 cos(wt) s1, i.e. the
/// rotating term plus its counter-rotating partner.
struct CosineDrive {
  double omega0 = 0.0;
  double omega1 = 0.0;
  double omega = 0.0;
};
/// Three-region Ramsey Hamiltonian in the lab frame.
struct PiecewiseRamsey {
  RamseySpec spec;
};

using TimeDependentH = std::variant<StaticH, RabiLab, CosineDrive, PiecewiseRamsey>;

Operator2 hamiltonian_at(const TimeDependentH& h, double t);

/// Rotating-frame drive CosineDrive reduces to after dropping the
/// counter-rotating term.
RabiLab rotating_wave(const CosineDrive& drive);

/// H' = omega1 (s1 + ((omega - omega0)/(2 omega1)) s3). Exact for the
/// circular drive; no approximation is involved.
PauliForm rotating_frame_hamiltonian(const RabiSpec& spec);

/// Lab-frame propagator from t0 to t0 + t:
/// exp(i w (t0+t) s3/2) exp(-i H' t) exp(-i w t0 s3/2).
Operator2 rabi_unitary(const RabiSpec& spec, double t);

SpinState propagate_pulses(const PulseSequence& seq, const SpinState& psi0);

/// Idealized five-factor Ramsey propagator U(t0, t0+tau+T):
/// exp(i w (t0+tau+T) s3/2) exp(-i w2 tau s1/2) exp(-i (w-w0) T s3/2)
///   exp(-i w2 tau s1/2) exp(-i w t0 s3/2).
/// The pulses ignore the drive detuning; w0 is the true frequency.
Operator2 ramsey_unitary(const RamseySpec& spec);

/// The Ramsey sequence in the rotating frame: detuned pulse, free
/// precession at (w - w0)/2 s3, detuned pulse. Honors spec.regions.
PulseSequence ramsey_rotating_sequence(const RamseySpec& spec);

/// Exact lab-frame propagator of the piecewise Ramsey Hamiltonian,
/// including the detuning during the pulses.
Operator2 ramsey_exact_unitary(const RamseySpec& spec);

/// Fixed-step classical RK4 for i d|psi>/dt = H(t)|psi>. The interval is
/// split at Hamiltonian discontinuities and each piece uses
/// ceil(length/dt) equal steps. Throws StepTooLarge when dt > t1 - t0.
SpinState propagate_ode_oracle(const TimeDependentH& h, const SpinState& psi0, double t0, double t1,
                               double dt);

/// 2000 steps per shortest period 2 pi / max(|omega|, |omega0|, |omega1|).
double default_step(double omega, double omega0, double omega1);

/// Largest state distance between the full cosine drive and its rotating
/// wave counterpart over [0, t], both integrated by RK4 on the same grid.
/// dt <= 0 selects default_step. Warns when omega1/omega > 0.1.
double rwa_residual(const CosineDrive& drive, const SpinState& psi0, double t, double dt = 0.0);

/// |<post|U|pre>|^2
double transition_probability(const Operator2& U, const SpinState& pre, const SpinState& post);

/// First-order (in omega1) transition probability
/// 4 w1^2 sin^2((w_km - w) t/2) / (w_km - w)^2, with the limit w1^2 t^2 at
/// w = w_km and 0 when w1 = 0.
double perturbative_probability(double omega_km, double omega1, double omega, double t);

}  // namespace qres

#endif  // QRES_DYNAMICS_HPP
