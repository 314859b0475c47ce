#include "qres/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qres/diagnostics.hpp"
#include "qres/error.hpp"

namespace qres {
namespace {

// exp(i theta s3 / 2)
Operator2 z_phase(double theta) { return Operator2::diag(std::polar(1.0, 0.5 * theta), std::polar(1.0, -0.5 * theta)); }

SpinState scaled_add(const SpinState& a, Complex s, const SpinState& b) {
  return {a.up + s * b.up, a.down + s * b.down};
}

// -i H psi
SpinState derivative(const Operator2& h, const SpinState& psi) {
  const SpinState hp = h * psi;
  return {-kI * hp.up, -kI * hp.down};
}

Operator2 hamiltonian_impl(const TimeDependentH& h, double t, double region_t);

// region_t picks the piece of a piecewise Hamiltonian, so stage evaluations
// on a piece boundary stay on the piece being integrated.
SpinState rk4_step(const TimeDependentH& h, const SpinState& psi, double t, double dt, double region_t) {
  const SpinState k1 = derivative(hamiltonian_impl(h, t, region_t), psi);
  const SpinState k2 = derivative(hamiltonian_impl(h, t + 0.5 * dt, region_t), scaled_add(psi, 0.5 * dt, k1));
  const SpinState k3 = derivative(hamiltonian_impl(h, t + 0.5 * dt, region_t), scaled_add(psi, 0.5 * dt, k2));
  const SpinState k4 = derivative(hamiltonian_impl(h, t + dt, region_t), scaled_add(psi, dt, k3));
  const double w = dt / 6.0;
  return {psi.up + w * (k1.up + 2.0 * k2.up + 2.0 * k3.up + k4.up),
          psi.down + w * (k1.down + 2.0 * k2.down + 2.0 * k3.down + k4.down)};
}

// Points strictly inside (t0, t1) where H jumps.
std::vector<double> breakpoints(const TimeDependentH& h, double t0, double t1) {
  std::vector<double> out;
  if (const auto* r = std::get_if<PiecewiseRamsey>(&h)) {
    const auto& s = r->spec;
    for (double b : {s.t0, s.t0 + 0.5 * s.tau, s.t0 + 0.5 * s.tau + s.T, s.t0 + s.tau + s.T}) {
      if (b > t0 && b < t1) out.push_back(b);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PauliForm free_precession_generator(double detuning) {
  // (detuning / 2) s3 with a non-negative scale
  const double sign = detuning < 0.0 ? -1.0 : 1.0;
  return PauliForm(0.5 * std::abs(detuning), 0.0, Vec3C::real(0.0, 0.0, sign));
}

void require_finite(std::vector<std::string>& errs, const char* name, double v) {
  if (!std::isfinite(v)) errs.push_back(std::string(name) + " must be finite");
}

}  // namespace

SpinState operator*(const Operator2& m, const SpinState& s) {
  return {m(0, 0) * s.up + m(0, 1) * s.down, m(1, 0) * s.up + m(1, 1) * s.down};
}

Complex inner(const SpinState& a, const SpinState& b) { return std::conj(a.up) * b.up + std::conj(a.down) * b.down; }

double distance(const SpinState& a, const SpinState& b) {
  return std::sqrt(std::norm(a.up - b.up) + std::norm(a.down - b.down));
}

void RabiSpec::validate() const {
  std::vector<std::string> errs;
  require_finite(errs, "omega0", omega0);
  require_finite(errs, "omega", omega);
  require_finite(errs, "t0", t0);
  require_finite(errs, "epsilon", epsilon);
  if (!(omega1 > 0.0) || !std::isfinite(omega1)) errs.emplace_back("omega1 must be > 0");
  if (!errs.empty()) throw InvalidConfig(errs);
}

void RamseySpec::validate() const {
  std::vector<std::string> errs;
  require_finite(errs, "omega0", omega0);
  require_finite(errs, "omega", omega);
  require_finite(errs, "t0", t0);
  require_finite(errs, "epsilon", epsilon);
  if (!(omega2 > 0.0) || !std::isfinite(omega2)) errs.emplace_back("omega2 must be > 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) errs.emplace_back("tau must be > 0");
  if (!(T >= 0.0) || !std::isfinite(T)) errs.emplace_back("T must be >= 0");
  if (!errs.empty()) throw InvalidConfig(errs);
}

PulseSequence::PulseSequence(std::vector<PulseSegment> segments) {
  for (const auto& s : segments) add(s.generator, s.duration);
}

PulseSequence& PulseSequence::add(const PauliForm& generator, double duration) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw InvalidArgument("PulseSequence: duration must be finite and >= 0");
  }
  segments_.push_back({generator, duration});
  return *this;
}

double PulseSequence::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments_) t += s.duration;
  return t;
}

Operator2 PulseSequence::unitary() const {
  Operator2 u = Operator2::identity();
  for (const auto& s : segments_) u = evolution(s.generator, s.duration) * u;
  return u;
}

namespace {

Operator2 hamiltonian_impl(const TimeDependentH& h, double t, double region_t) {
  struct Visitor {
    double t;
    double region_t;
    Operator2 operator()(const StaticH& s) const { return pauli_compose(s.h); }
    Operator2 operator()(const RabiLab& r) const {
      return pauli_vector(Vec3C::real(r.omega1 * std::cos(r.omega * t), -r.omega1 * std::sin(r.omega * t),
                                      -0.5 * r.omega0));
    }
    Operator2 operator()(const CosineDrive& c) const {
      return pauli_vector(Vec3C::real(2.0 * c.omega1 * std::cos(c.omega * t), 0.0, -0.5 * c.omega0));
    }
    Operator2 operator()(const PiecewiseRamsey& p) const {
      const auto& s = p.spec;
      const double first_end = s.t0 + 0.5 * s.tau;
      const double free_end = first_end + s.T;
      const double last_end = free_end + 0.5 * s.tau;
      const double r = region_t;
      const bool pulse = (r >= s.t0 && r < first_end) || (r >= free_end && r <= last_end);
      if (!pulse) return pauli_vector(Vec3C::real(0.0, 0.0, -0.5 * s.omega0));
      return pauli_vector(Vec3C::real(s.omega2 * std::cos(s.omega * t), -s.omega2 * std::sin(s.omega * t),
                                      -0.5 * s.pulse_omega0()));
    }
  };
  return std::visit(Visitor{t, region_t}, h);
}

}  // namespace

Operator2 hamiltonian_at(const TimeDependentH& h, double t) { return hamiltonian_impl(h, t, t); }

RabiLab rotating_wave(const CosineDrive& drive) { return {drive.omega0, drive.omega1, drive.omega}; }

PauliForm rotating_frame_hamiltonian(const RabiSpec& spec) {
  spec.validate();
  return PauliForm(spec.omega1, 0.0, Vec3C::real(1.0, 0.0, (spec.omega - spec.omega0) / (2.0 * spec.omega1)));
}

Operator2 rabi_unitary(const RabiSpec& spec, double t) {
  const PauliForm hp = rotating_frame_hamiltonian(spec);
  return z_phase(spec.omega * (spec.t0 + t)) * evolution(hp, t) * z_phase(-spec.omega * spec.t0);
}

SpinState propagate_pulses(const PulseSequence& seq, const SpinState& psi0) {
  SpinState psi = psi0;
  for (const auto& s : seq.segments()) psi = evolution(s.generator, s.duration) * psi;
  return psi;
}

Operator2 ramsey_unitary(const RamseySpec& spec) {
  spec.validate();
  const Operator2 pulse = exp_i_pauli(Vec3C::real(-0.5 * spec.omega2 * spec.tau, 0.0, 0.0));
  const Operator2 free = z_phase(-(spec.omega - spec.omega0) * spec.T);
  return z_phase(spec.omega * (spec.t0 + spec.tau + spec.T)) * pulse * free * pulse *
         z_phase(-spec.omega * spec.t0);
}

PulseSequence ramsey_rotating_sequence(const RamseySpec& spec) {
  spec.validate();
  const PauliForm pulse(spec.omega2, 0.0,
                        Vec3C::real(1.0, 0.0, (spec.omega - spec.pulse_omega0()) / (2.0 * spec.omega2)));
  PulseSequence seq;
  seq.add(pulse, 0.5 * spec.tau).add(free_precession_generator(spec.omega - spec.omega0), spec.T).add(pulse, 0.5 * spec.tau);
  return seq;
}

Operator2 ramsey_exact_unitary(const RamseySpec& spec) {
  const PulseSequence seq = ramsey_rotating_sequence(spec);
  return z_phase(spec.omega * (spec.t0 + spec.tau + spec.T)) * seq.unitary() * z_phase(-spec.omega * spec.t0);
}

SpinState propagate_ode_oracle(const TimeDependentH& h, const SpinState& psi0, double t0, double t1, double dt) {
  if (!(t1 > t0)) throw InvalidArgument("propagate_ode_oracle: requires t1 > t0");
  if (!(dt > 0.0)) throw InvalidArgument("propagate_ode_oracle: requires dt > 0");
  if (dt > t1 - t0) throw StepTooLarge("propagate_ode_oracle: dt exceeds the integration interval");

  std::vector<double> knots{t0};
  for (double b : breakpoints(h, t0, t1)) knots.push_back(b);
  knots.push_back(t1);

  SpinState psi = psi0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = knots[k];
    const double b = knots[k + 1];
    const auto steps = static_cast<long>(std::ceil((b - a) / dt - 1e-9));
    const double h_step = (b - a) / static_cast<double>(std::max(1L, steps));
    const double mid = 0.5 * (a + b);
    for (long i = 0; i < std::max(1L, steps); ++i) {
      psi = rk4_step(h, psi, a + static_cast<double>(i) * h_step, h_step, mid);
    }
  }
  return psi;
}

double default_step(double omega, double omega0, double omega1) {
  const double fastest = std::max({std::abs(omega), std::abs(omega0), std::abs(omega1)});
  if (fastest == 0.0) return 1.0;
  return 2.0 * std::numbers::pi / fastest / 2000.0;
}

double rwa_residual(const CosineDrive& drive, const SpinState& psi0, double t, double dt) {
  if (!(t > 0.0)) throw InvalidArgument("rwa_residual: requires t > 0");
  if (drive.omega != 0.0 && std::abs(drive.omega1 / drive.omega) > 0.1) {
    warn("rwa_residual: omega1/omega = " + std::to_string(drive.omega1 / drive.omega) +
         " is not small; the rotating wave approximation is not expected to hold");
  }
  if (dt <= 0.0) dt = default_step(drive.omega, drive.omega0, 2.0 * drive.omega1);
  const auto steps = std::max(1L, static_cast<long>(std::ceil(t / dt - 1e-9)));
  const double h_step = t / static_cast<double>(steps);

  const TimeDependentH full = drive;
  const TimeDependentH rwa = rotating_wave(drive);
  SpinState a = psi0;
  SpinState b = psi0;
  double worst = 0.0;
  for (long i = 0; i < steps; ++i) {
    const double ti = static_cast<double>(i) * h_step;
    a = rk4_step(full, a, ti, h_step, ti);
    b = rk4_step(rwa, b, ti, h_step, ti);
    worst = std::max(worst, distance(a, b));
  }
  return worst;
}

double transition_probability(const Operator2& U, const SpinState& pre, const SpinState& post) {
  return std::norm(inner(post, U * pre));
}

double perturbative_probability(double omega_km, double omega1, double omega, double t) {
  if (omega1 == 0.0) return 0.0;
  const double x = 0.5 * (omega_km - omega) * t;
  const double sinc = std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return omega1 * omega1 * t * t * sinc * sinc;
}

}  // namespace qres
