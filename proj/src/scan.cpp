#include "qres/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "qres/dynamics.hpp"
#include "qres/error.hpp"
#include "qres/parallel.hpp"
#include "qres/weak.hpp"

namespace qres {
namespace {

RabiSpec rabi_spec(const ScanConfig& c, double omega, double epsilon) {
  RabiSpec s;
  s.omega0 = c.omega_bar0 + epsilon;
  s.omega1 = c.drive_strength;
  s.omega = omega;
  s.epsilon = epsilon;
  return s;
}

RamseySpec ramsey_spec(const ScanConfig& c, double omega, double epsilon, EpsilonRegions regions) {
  RamseySpec s;
  s.omega0 = c.omega_bar0 + epsilon;
  s.omega2 = c.drive_strength;
  s.omega = omega;
  s.tau = c.tau;
  s.T = c.t_or_T;
  s.epsilon = epsilon;
  s.regions = regions;
  return s;
}

double detuning_phase(const ScanConfig& c, double omega) {
  return c.mode == ScanMode::rabi ? (omega - c.omega_bar0) / (2.0 * c.drive_strength)
                                  : 0.5 * (omega - c.omega_bar0) * c.t_or_T;
}

// -(x/2) s3 with a non-negative scale.
PauliForm half_z(double x) {
  return PauliForm(0.5 * std::abs(x), 0.0, Vec3C::real(0.0, 0.0, x > 0.0 ? -1.0 : 1.0));
}

ScanRow compute_row(const ScanConfig& c, double omega) {
  ScanRow row;
  row.omega = omega;
  const Operator2 u = c.mode == ScanMode::rabi
                          ? rabi_unitary(rabi_spec(c, omega, c.epsilon), c.t_or_T)
                          : ramsey_exact_unitary(ramsey_spec(c, omega, c.epsilon, EpsilonRegions::all));
  row.pr_stay = transition_probability(u, SpinState::plus(), SpinState::plus());
  row.pr_flip = transition_probability(u, SpinState::plus(), SpinState::minus());

  const double phi = detuning_phase(c, omega);
  row.strength = c.strength();
  row.pr_first_order = first_order_stay_probability(phi, c.pulse_area, row.strength);
  try {
    row.im_weak = rabi_weak_value_im(phi, c.pulse_area);
  } catch (const Diverged&) {
    row.im_weak = 0.0;
    row.diverged = true;
  }
  return row;
}

struct ResidualPoint {
  double exact = 0.0;
  double first = 0.0;
};

ResidualPoint residual_point(const ScanConfig& c, double omega, double epsilon) {
  const SpinState plus = SpinState::plus();
  ResidualPoint p;
  if (c.mode == ScanMode::rabi) {
    const RabiSpec spec = rabi_spec(c, omega, epsilon);
    p.exact = transition_probability(rabi_unitary(spec, c.t_or_T), plus, plus);
    const double phi = detuning_phase(c, omega);
    const WeakContext ctx{PauliForm(c.drive_strength, 0.0, Vec3C::real(1.0, 0.0, phi)), half_z(epsilon), c.t_or_T};
    p.first = first_order_probability(ctx, {plus, plus});
    return p;
  }
  const RamseySpec spec = ramsey_spec(c, omega, epsilon, EpsilonRegions::free_only);
  p.exact = transition_probability(ramsey_exact_unitary(spec), plus, plus);

  // Lab-frame factorization U = A e^{-i H0 T} B with H0 = -(w0_bar/2) s3:
  // B is the first pulse, A the second pulse wrapped in the frame phases.
  const Operator2 pulse = evolution(ramsey_rotating_sequence(spec).segments().front().generator, 0.5 * c.tau);
  const auto z = [](double theta) {
    return Operator2::diag(std::polar(1.0, 0.5 * theta), std::polar(1.0, -0.5 * theta));
  };
  const Operator2 a = z(omega * (c.tau + c.t_or_T)) * pulse * z(-omega * c.t_or_T);
  const SpinState pre = pulse * plus;
  const SpinState post = a.adjoint() * plus;
  const WeakContext ctx{half_z(c.omega_bar0), half_z(epsilon), c.t_or_T};
  p.first = first_order_probability(ctx, {pre, post});
  return p;
}

}  // namespace

double ScanConfig::strength() const { return mode == ScanMode::rabi ? epsilon / drive_strength : epsilon * t_or_T; }

double ScanConfig::omega_at(std::size_t i) const {
  if (i + 1 >= steps) return omega_max;
  return omega_min + (omega_max - omega_min) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

void ScanConfig::validate() const {
  std::vector<std::string> errs;
  const auto finite = [&](const char* name, double v) {
    if (!std::isfinite(v)) errs.push_back(std::string(name) + " must be finite");
  };
  finite("omega_bar0", omega_bar0);
  finite("epsilon", epsilon);
  finite("pulse_area", pulse_area);
  if (!(drive_strength > 0.0) || !std::isfinite(drive_strength)) errs.emplace_back("drive_strength must be > 0");
  if (mode == ScanMode::rabi) {
    if (!(t_or_T > 0.0) || !std::isfinite(t_or_T)) errs.emplace_back("t_or_T must be > 0");
  } else {
    if (!(t_or_T >= 0.0) || !std::isfinite(t_or_T)) errs.emplace_back("t_or_T must be >= 0");
    if (!(tau > 0.0) || !std::isfinite(tau)) errs.emplace_back("tau must be > 0");
  }
  if (!(omega_min < omega_max) || !std::isfinite(omega_min) || !std::isfinite(omega_max)) {
    errs.emplace_back("omega_min must be < omega_max");
  }
  if (steps < 2) errs.emplace_back("steps must be >= 2");
  if (std::abs(drive_strength * pulse_length() - pulse_area) > 1e-12 * std::max(1.0, std::abs(pulse_area))) {
    errs.emplace_back("pulse_area must equal drive_strength * " +
                      std::string(mode == ScanMode::rabi ? "t_or_T" : "tau") + " within 1e-12");
  }
  if (!errs.empty()) throw InvalidConfig(errs);
}

ScanConfig rabi_scan_config(double omega_bar0, double t, double pulse_area, double omega_min, double omega_max,
                            std::size_t steps, double epsilon) {
  ScanConfig c;
  c.mode = ScanMode::rabi;
  c.omega_bar0 = omega_bar0;
  c.t_or_T = t;
  c.pulse_area = pulse_area;
  c.drive_strength = pulse_area / t;
  c.omega_min = omega_min;
  c.omega_max = omega_max;
  c.steps = steps;
  c.epsilon = epsilon;
  return c;
}

ScanConfig ramsey_scan_config(double omega_bar0, double T, double tau, double pulse_area, double omega_min,
                              double omega_max, std::size_t steps, double epsilon) {
  ScanConfig c;
  c.mode = ScanMode::ramsey;
  c.omega_bar0 = omega_bar0;
  c.t_or_T = T;
  c.tau = tau;
  c.pulse_area = pulse_area;
  c.drive_strength = pulse_area / tau;
  c.omega_min = omega_min;
  c.omega_max = omega_max;
  c.steps = steps;
  c.epsilon = epsilon;
  return c;
}

ScanResult scan(const ScanConfig& config) {
  config.validate();
  ScanResult result{config, std::vector<ScanRow>(config.steps)};
  parallel_for(config.steps, [&](std::size_t i) { result.rows[i] = compute_row(config, config.omega_at(i)); });
  return result;
}

double fwhm(const ScanResult& result) {
  const auto& rows = result.rows;
  if (rows.size() < 3) throw NoPeak("fwhm: fewer than three rows");
  std::size_t peak = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].pr_flip > rows[peak].pr_flip) peak = i;
  }
  if (peak == 0 || peak + 1 == rows.size()) throw NoPeak("fwhm: maximum lies on the grid edge");
  const double top = rows[peak].pr_flip;
  const double half = 0.5 * top;

  std::size_t lo = peak;
  while (lo > 0 && rows[lo - 1].pr_flip >= half) --lo;
  if (lo == 0) throw NoPeak("fwhm: half level not crossed below the peak");
  std::size_t hi = peak;
  while (hi + 1 < rows.size() && rows[hi + 1].pr_flip >= half) ++hi;
  if (hi + 1 == rows.size()) throw NoPeak("fwhm: half level not crossed above the peak");

  for (std::size_t i = 0; i < rows.size(); ++i) {
    if ((i < lo || i > hi) && rows[i].pr_flip >= top - 1e-12) throw NoPeak("fwhm: global maximum is not unique");
  }

  const auto cross = [&](std::size_t outside, std::size_t inside) {
    const ScanRow& a = rows[outside];
    const ScanRow& b = rows[inside];
    return a.omega + (half - a.pr_flip) * (b.omega - a.omega) / (b.pr_flip - a.pr_flip);
  };
  return cross(hi + 1, hi) - cross(lo - 1, lo);
}

std::vector<ResidualRow> compare_first_order_exact(const ScanConfig& config, const std::vector<double>& deltas) {
  config.validate();
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!(deltas[k] >= 0.0) || !std::isfinite(deltas[k])) {
      throw InvalidArgument("compare_first_order_exact: deltas must be finite and >= 0");
    }
    if (k > 0 && !(deltas[k] < deltas[k - 1])) {
      throw InvalidArgument("compare_first_order_exact: deltas must be strictly descending");
    }
  }
  if (config.mode == ScanMode::ramsey) {
    if (config.omega_bar0 == 0.0) throw InvalidArgument("compare_first_order_exact: ramsey needs omega_bar0 != 0");
    if (!(config.t_or_T > 0.0)) throw InvalidArgument("compare_first_order_exact: ramsey needs T > 0");
  }

  // Rows whose closed-form weak value diverges are skipped.
  std::vector<bool> keep(config.steps, true);
  for (std::size_t i = 0; i < config.steps; ++i) {
    try {
      rabi_weak_value_im(detuning_phase(config, config.omega_at(i)), config.pulse_area);
    } catch (const Diverged&) {
      keep[i] = false;
    }
  }

  std::vector<ResidualRow> out;
  for (double delta : deltas) {
    const double epsilon = config.mode == ScanMode::rabi ? delta * config.drive_strength : delta / config.t_or_T;
    std::vector<double> residual(config.steps, 0.0);
    parallel_for(config.steps, [&](std::size_t i) {
      if (!keep[i]) return;
      const ResidualPoint p = residual_point(config, config.omega_at(i), epsilon);
      residual[i] = std::abs(p.exact - p.first);
    });
    ResidualRow row;
    row.delta = delta;
    row.max_residual = *std::max_element(residual.begin(), residual.end());
    if (!out.empty() && row.max_residual > 0.0) row.ratio = out.back().max_residual / row.max_residual;
    out.push_back(row);
  }
  return out;
}

std::vector<SensitivityRow> sensitivity_curve(const ScanConfig& config, double alpha, double n_bar) {
  config.validate();
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("sensitivity_curve: alpha must lie in [0, 1]");
  if (!(n_bar > 0.0) || !std::isfinite(n_bar)) throw InvalidArgument("sensitivity_curve: n_bar must be > 0");
  const double T = config.t_or_T;
  const double omega0 = config.omega_bar0 + config.epsilon;
  std::vector<SensitivityRow> out(config.steps);
  for (std::size_t i = 0; i < config.steps; ++i) {
    const double omega = config.omega_at(i);
    const double d = n_bar * alpha * T * std::sin((omega - omega0) * T);
    out[i] = {omega, d, -d};
  }
  return out;
}

void write_scan_csv(std::ostream& out, const ScanResult& result) {
  out << "omega,pr_flip,pr_stay,pr_first_order,im_weak,strength,diverged\n";
  char buf[256];
  for (const ScanRow& r : result.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.omega, r.pr_flip, r.pr_stay,
                  r.pr_first_order, r.im_weak, r.strength, r.diverged ? 1 : 0);
    out << buf;
  }
}

}  // namespace qres
