#include "qres/edm.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "qres/diagnostics.hpp"
#include "qres/dynamics.hpp"
#include "qres/error.hpp"
#include "qres/parallel.hpp"

namespace qres {
namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double sign_of(Spin spin) { return spin == Spin::up ? -1.0 : 1.0; }

double draw_poisson(std::mt19937_64& gen, double mean) {
  if (!(mean > 0.0)) return 0.0;
  std::poisson_distribution<long long> dist(mean);
  return static_cast<double>(dist(gen));
}

struct Channel {
  std::vector<double> x;  // delta omega
  std::vector<double> y;  // counts
  double s = -1.0;        // -1 for spin up, +1 for spin down
};

struct Params {
  double a = 0.0;    // N
  double b = 0.0;    // N alpha
  double phi = 0.0;  // Phi
};

double ssr(const Channel& ch, const Params& p, double T) {
  double total = 0.0;
  for (std::size_t k = 0; k < ch.x.size(); ++k) {
    const double r = ch.y[k] - p.a - p.b * ch.s * std::cos((ch.x[k] - p.phi) * T);
    total += r * r;
  }
  return total;
}

// Linear least squares for (a, b) at fixed phi. Returns false when singular.
bool linear_fit(const Channel& ch, double phi, double T, Params& out) {
  double n = 0.0, sc = 0.0, scc = 0.0, sy = 0.0, syc = 0.0;
  for (std::size_t k = 0; k < ch.x.size(); ++k) {
    const double c = ch.s * std::cos((ch.x[k] - phi) * T);
    n += 1.0;
    sc += c;
    scc += c * c;
    sy += ch.y[k];
    syc += ch.y[k] * c;
  }
  const double det = n * scc - sc * sc;
  if (!(std::abs(det) > 1e-12 * n * n)) return false;
  out.a = (sy * scc - sc * syc) / det;
  out.b = (n * syc - sc * sy) / det;
  out.phi = phi;
  return true;
}

// Solves the 3x3 system m x = v by Gaussian elimination with partial pivoting.
bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> v, std::array<double, 3>& x) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0) return false;
    std::swap(m[piv], m[col]);
    std::swap(v[piv], v[col]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
      v[r] -= f * v[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double acc = v[r];
    for (int c = r + 1; c < 3; ++c) acc -= m[r][c] * x[c];
    x[r] = acc / m[r][r];
  }
  return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]);
}

double wrap_phase(double phi, double T) {
  const double period = 2.0 * kPi / T;
  return phi - period * std::floor((phi + kPi / T) / period);
}

RunFit fit_channel(const Channel& ch, double T) {
  constexpr int kGrid = 256;
  Params best;
  double best_ssr = std::numeric_limits<double>::infinity();
  for (int g = 0; g < kGrid; ++g) {
    Params p;
    if (!linear_fit(ch, -kPi / T + 2.0 * kPi / T * g / kGrid, T, p)) continue;
    const double e = ssr(ch, p, T);
    if (e < best_ssr) {
      best_ssr = e;
      best = p;
    }
  }
  if (!std::isfinite(best_ssr)) throw InsufficientData("fit_run: fringe model is not identifiable");

  bool converged = false;
  for (int iter = 0; iter < 50 && !converged; ++iter) {
    std::array<std::array<double, 3>, 3> jtj{};
    std::array<double, 3> jtr{};
    for (std::size_t k = 0; k < ch.x.size(); ++k) {
      const double arg = (ch.x[k] - best.phi) * T;
      const double c = ch.s * std::cos(arg);
      const std::array<double, 3> grad{1.0, c, best.b * ch.s * std::sin(arg) * T};
      const double r = ch.y[k] - best.a - best.b * c;
      for (int i = 0; i < 3; ++i) {
        jtr[i] += grad[i] * r;
        for (int m = 0; m < 3; ++m) jtj[i][m] += grad[i] * grad[m];
      }
    }
    std::array<double, 3> step{};
    if (!solve3(jtj, jtr, step)) break;

    const double scale = std::max(std::abs(best.a), 1e-300);
    const double size = std::max({std::abs(step[0]) / scale, std::abs(step[1]) / scale, std::abs(step[2]) * T});
    double lambda = 1.0;
    Params trial;
    double trial_ssr = best_ssr;
    bool improved = false;
    for (int halving = 0; halving < 30; ++halving) {
      trial = {best.a + lambda * step[0], best.b + lambda * step[1], best.phi + lambda * step[2]};
      trial_ssr = ssr(ch, trial, T);
      if (trial_ssr <= best_ssr) {
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (improved) {
      best = trial;
      best_ssr = trial_ssr;
    }
    // A step below 1e-12 has converged; a tiny step that cannot lower the
    // sum of squares means the iteration sits on the rounding floor.
    if ((improved && size * lambda <= 1e-12) || (!improved && size <= 1e-8)) converged = true;
    if (!improved && !converged) break;
  }

  RunFit fit;
  fit.n_bar_fit = best.a;
  fit.alpha_fit = best.a != 0.0 ? best.b / best.a : 0.0;
  fit.phi_fit = best.phi;
  if (fit.alpha_fit < 0.0) {
    fit.alpha_fit = -fit.alpha_fit;
    fit.phi_fit += kPi / T;
  }
  fit.phi_fit = wrap_phase(fit.phi_fit, T);
  fit.residual = std::sqrt(best_ssr / static_cast<double>(ch.x.size()));
  fit.converged = converged;
  return fit;
}

void require(std::vector<std::string>& errs, bool ok, const char* msg) {
  if (!ok) errs.emplace_back(msg);
}

double parse_number(const std::string& field, int line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError(line, "not a number: '" + field + "'");
  return v;
}

}  // namespace

double epsilon_from_edm(double d_ecm, double e_field_v_per_cm) {
  return 2.0 * d_ecm * e_field_v_per_cm * kElementaryCharge / kHbar;
}

double edm_from_epsilon(double epsilon, double e_field_v_per_cm) {
  return epsilon * kHbar / (2.0 * e_field_v_per_cm * kElementaryCharge);
}

void ImperfectionModel::validate() const {
  std::vector<std::string> errs;
  require(errs, p_i >= 0.0 && p_i <= 1.0, "p_i must lie in [0, 1]");
  require(errs, eps_f >= 0.0 && eps_f <= 1.0, "eps_f must lie in [0, 1]");
  if (!errs.empty()) throw InvalidConfig(errs);
}

double detection_probability(const ImperfectionModel& model, double phi, double eps_t, Spin spin) {
  model.validate();
  return 0.5 * (1.0 + sign_of(spin) * model.alpha() * std::cos(2.0 * phi - eps_t));
}

double detection_probability_explicit(const ImperfectionModel& model, double phi, double eps_t, Spin spin) {
  model.validate();
  // T = tau = 1 and w0_bar = 0, so w = 2 phi and w0 = eps T.
  RamseySpec spec;
  spec.T = 1.0;
  spec.tau = 1.0;
  spec.omega2 = 0.5 * kPi;
  spec.omega = 2.0 * phi;
  spec.epsilon = eps_t;
  spec.omega0 = eps_t;
  const Operator2 u = ramsey_unitary(spec);
  const SpinState up = SpinState::plus();
  const SpinState down = SpinState::minus();
  const double pp = transition_probability(u, up, up);
  const double pm = transition_probability(u, up, down);
  const double mp = transition_probability(u, down, up);
  const double mm = transition_probability(u, down, down);

  const double w_plus = 0.5 * (1.0 + model.p_i);
  const double w_minus = 0.5 * (1.0 - model.p_i);
  const double f = model.eps_f;
  if (spin == Spin::up) {
    return w_plus * ((1.0 - f) * pp + f * pm) + w_minus * ((1.0 - f) * mp + f * mm);
  }
  return w_plus * ((1.0 - f) * pm + f * pp) + w_minus * ((1.0 - f) * mm + f * mp);
}

double first_order_detection(const ImperfectionModel& model, double phi, double eps_t, Spin spin) {
  model.validate();
  const double pr0 = std::sin(phi) * std::sin(phi);
  // Pr++(0) Im s3^W = sin^2(phi) cot(phi), finite at phi = 0.
  const double pr0_weak = std::sin(phi) * std::cos(phi);
  return 0.5 * (1.0 + sign_of(spin) * model.alpha() * (1.0 - 2.0 * pr0 + 2.0 * eps_t * pr0_weak));
}

std::vector<double> EdmConfig::default_delta_omega(double T) {
  const double q = 0.5 * kPi / T;
  return {-1.2 * q, -0.8 * q, 0.8 * q, 1.2 * q};
}

std::vector<int> EdmConfig::default_field_pattern() { return {1, 1, 1, 1, -1, -1, -1, -1}; }

void EdmConfig::validate() const {
  std::vector<std::string> errs;
  try {
    model.validate();
  } catch (const InvalidConfig& e) {
    errs.insert(errs.end(), e.violations().begin(), e.violations().end());
  }
  require(errs, std::isfinite(omega_bar0), "omega_bar0 must be finite");
  require(errs, std::isfinite(d_n), "d_n must be finite");
  require(errs, e_field > 0.0 && std::isfinite(e_field), "e_field must be > 0");
  require(errs, std::abs(omega2_tau - 0.5 * kPi) <= 1e-12, "omega2_tau must equal pi/2");
  require(errs, T > 0.0 && std::isfinite(T), "T must be > 0");
  require(errs, tau >= 0.0 && std::isfinite(tau), "tau must be >= 0");
  require(errs, n_bar > 0.0 && std::isfinite(n_bar), "n_bar must be > 0");
  require(errs, !delta_omega_list.empty(), "delta_omega_list must not be empty");
  require(errs, std::all_of(delta_omega_list.begin(), delta_omega_list.end(), [](double v) { return std::isfinite(v); }),
          "delta_omega_list entries must be finite");
  require(errs, !field_pattern.empty(), "field_pattern must not be empty");
  require(errs, std::all_of(field_pattern.begin(), field_pattern.end(), [](int s) { return s == 1 || s == -1; }),
          "field_pattern entries must be +1 or -1");
  require(errs, cycles_per_run >= 1, "cycles_per_run must be >= 1");
  require(errs, runs >= 1, "runs must be >= 1");
  if (!errs.empty()) throw InvalidConfig(errs);
}

std::pair<double, double> expected_counts(const EdmConfig& config, double delta_omega, int field_sign) {
  const double eps = -static_cast<double>(field_sign) * config.epsilon_magnitude();
  const double c = config.model.alpha() * std::cos((delta_omega - eps) * config.T);
  return {config.n_bar * (1.0 - c), config.n_bar * (1.0 + c)};
}

CycleRecord simulate_cycle(const EdmConfig& config, std::size_t j) {
  CycleRecord rec;
  rec.j = j;
  rec.delta_omega = config.delta_omega(j);
  rec.field_sign = config.field_sign(j);
  const auto [mean_plus, mean_minus] = expected_counts(config, rec.delta_omega, rec.field_sign);
  std::mt19937_64 gen(splitmix64(config.seed ^ splitmix64(static_cast<std::uint64_t>(j))));
  rec.n_plus = draw_poisson(gen, mean_plus);
  rec.n_minus = draw_poisson(gen, mean_minus);
  return rec;
}

std::vector<CycleRecord> simulate_all(const EdmConfig& config) {
  config.validate();
  std::vector<CycleRecord> out(config.total_cycles());
  parallel_for(out.size(), [&](std::size_t j) { out[j] = simulate_cycle(config, j); });
  return out;
}

std::pair<RunFit, RunFit> fit_run(const std::vector<CycleRecord>& cycles, double T) {
  if (!(T > 0.0)) throw InvalidArgument("fit_run: T must be > 0");
  if (cycles.size() < 4) throw InsufficientData("fit_run: need at least 4 cycles");
  std::set<double> distinct;
  for (const auto& c : cycles) distinct.insert(c.delta_omega);
  if (distinct.size() < 3) throw InsufficientData("fit_run: need at least 3 distinct delta_omega values");

  Channel up;
  Channel down;
  up.s = -1.0;
  down.s = 1.0;
  for (const auto& c : cycles) {
    up.x.push_back(c.delta_omega);
    up.y.push_back(c.n_plus);
    down.x.push_back(c.delta_omega);
    down.y.push_back(c.n_minus);
  }
  std::pair<RunFit, RunFit> fits{fit_channel(up, T), fit_channel(down, T)};
  if (!fits.first.converged || !fits.second.converged) warn("fit_run: Gauss-Newton did not converge in 50 iterations");
  return fits;
}

double extract_cycle_phase(const CycleRecord& cycle, const RunFit& fit, double T, Spin spin) {
  const double n = spin == Spin::up ? cycle.n_plus : cycle.n_minus;
  const double amp = fit.n_bar_fit * fit.alpha_fit;
  const double arg = sign_of(spin) * (n - fit.n_bar_fit) / amp;
  if (!std::isfinite(arg) || std::abs(arg) > 1.0 + 1e-9) {
    throw OutOfRange("extract_cycle_phase: fringe cosine outside [-1, 1]", arg);
  }
  const double theta = std::acos(std::clamp(arg, -1.0, 1.0));
  double best = std::numeric_limits<double>::infinity();
  for (double branch : {theta, -theta}) {
    for (int k = -1; k <= 1; ++k) {
      const double eps = cycle.delta_omega - fit.phi_fit - (branch + 2.0 * kPi * k) / T;
      if (std::abs(eps) < std::abs(best)) best = eps;
    }
  }
  return best;
}

std::vector<std::pair<RunFit, RunFit>> fit_all_runs(const std::vector<CycleRecord>& records, const EdmConfig& config) {
  std::map<std::size_t, std::vector<CycleRecord>> runs;
  for (const auto& r : records) runs[r.j / config.cycles_per_run].push_back(r);
  if (runs.empty()) throw InsufficientData("fit_all_runs: no cycles");
  std::vector<std::pair<RunFit, RunFit>> fits(runs.rbegin()->first + 1);
  for (std::size_t r = 0; r < fits.size(); ++r) {
    const auto it = runs.find(r);
    if (it == runs.end()) throw InsufficientData("fit_all_runs: run " + std::to_string(r) + " has no cycles");
    fits[r] = fit_run(it->second, config.T);
  }
  return fits;
}

EdmEstimate estimate_edm(const std::vector<CycleRecord>& records, const std::vector<std::pair<RunFit, RunFit>>& fits,
                         const EdmConfig& config) {
  double sum_par = 0.0, sum_anti = 0.0;
  std::size_t n_par = 0, n_anti = 0;
  EdmEstimate est;
  for (const auto& rec : records) {
    const std::size_t r = rec.j / config.cycles_per_run;
    if (r >= fits.size()) throw InvalidArgument("estimate_edm: no fit for run " + std::to_string(r));
    double eps = 0.0;
    try {
      eps = 0.5 * (extract_cycle_phase(rec, fits[r].first, config.T, Spin::up) +
                   extract_cycle_phase(rec, fits[r].second, config.T, Spin::down));
    } catch (const OutOfRange&) {
      ++est.dropped_cycles;
      continue;
    }
    if (rec.field_sign > 0) {
      sum_par += eps;
      ++n_par;
    } else {
      sum_anti += eps;
      ++n_anti;
    }
  }
  if (n_par == 0 || n_anti == 0) throw MissingFieldSign("estimate_edm: cycles for both field signs are required");
  est.used_cycles = n_par + n_anti;
  const double diff = sum_anti / static_cast<double>(n_anti) - sum_par / static_cast<double>(n_par);
  est.d_ecm = kHbar * diff / (4.0 * config.e_field * kElementaryCharge);
  return est;
}

double weak_value_from_run(const RunFit& fit, double delta_omega, double T) {
  const double half = 0.5 * (delta_omega - fit.phi_fit) * T;
  const double s = std::sin(half);
  if (std::abs(s) < 1e-12) throw Diverged("weak_value_from_run: fringe center");
  return std::cos(half) / s;
}

UncertaintyReport uncertainties(double alpha, double e_field, double T, double n_total, double phi,
                                std::optional<double> sigma_phi_t_override) {
  if (!(alpha > 0.0) || !(e_field > 0.0) || !(T > 0.0) || !(n_total > 0.0)) {
    throw InvalidArgument("uncertainties: alpha, e_field, T and n_total must be > 0");
  }
  const double s = std::sin(phi);
  if (!(std::abs(s) > 1e-15)) throw InvalidArgument("uncertainties: phi must not be a multiple of pi");
  if (sigma_phi_t_override && !(*sigma_phi_t_override > 0.0)) {
    throw InvalidArgument("uncertainties: sigma_phi_t override must be > 0");
  }
  UncertaintyReport rep;
  const double root_n = std::sqrt(n_total);
  rep.sigma_phi_t = sigma_phi_t_override.value_or(1.0 / (alpha * root_n));
  rep.sigma_d = kHbar / (2.0 * alpha * e_field * kElementaryCharge * T * root_n);
  rep.sigma_im_weak = rep.sigma_phi_t / (s * s);
  return rep;
}

void write_cycles_csv(std::ostream& out, const std::vector<CycleRecord>& cycles) {
  out << "j,delta_omega,field_sign,n_plus,n_minus\n";
  char buf[160];
  for (const auto& c : cycles) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%d,%.17g,%.17g\n", c.j, c.delta_omega, c.field_sign, c.n_plus,
                  c.n_minus);
    out << buf;
  }
}

std::vector<CycleRecord> read_cycles_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  const auto next = [&]() {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next()) throw ParseError(1, "empty cycle file");
  if (line != "j,delta_omega,field_sign,n_plus,n_minus") {
    throw ParseError(1, "expected header j,delta_omega,field_sign,n_plus,n_minus");
  }
  std::vector<CycleRecord> out;
  while (next()) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 5) throw ParseError(line_no, "expected 5 fields");
    CycleRecord c;
    const double j = parse_number(fields[0], line_no);
    if (j < 0.0 || j != std::floor(j)) throw ParseError(line_no, "j must be a non-negative integer");
    c.j = static_cast<std::size_t>(j);
    c.delta_omega = parse_number(fields[1], line_no);
    const double sign = parse_number(fields[2], line_no);
    if (sign != 1.0 && sign != -1.0) throw ParseError(line_no, "field_sign must be +1 or -1");
    c.field_sign = static_cast<int>(sign);
    c.n_plus = parse_number(fields[3], line_no);
    c.n_minus = parse_number(fields[4], line_no);
    if (!(c.n_plus >= 0.0) || !(c.n_minus >= 0.0)) throw ParseError(line_no, "counts must be >= 0");
    out.push_back(c);
  }
  return out;
}

}  // namespace qres
