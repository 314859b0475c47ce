#include "qres/verify.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>

#include "qres/dynamics.hpp"
#include "qres/edm.hpp"
#include "qres/error.hpp"
#include "qres/pauli.hpp"
#include "qres/scan.hpp"
#include "qres/weak.hpp"

namespace qres {
namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome resonance_nulls() {
  RabiSpec rabi;
  rabi.omega0 = 10.0;
  rabi.omega = 10.0;
  rabi.omega1 = 0.5 * kPi;
  const Operator2 ur = rabi_unitary(rabi, 1.0);

  RamseySpec ramsey;
  ramsey.omega0 = 10.0;
  ramsey.omega = 10.0;
  ramsey.tau = 0.02;
  ramsey.omega2 = 0.5 * kPi / ramsey.tau;
  ramsey.T = 1.0;
  const Operator2 ue = ramsey_exact_unitary(ramsey);
  const Operator2 ui = ramsey_unitary(ramsey);

  const SpinState p = SpinState::plus();
  const SpinState m = SpinState::minus();
  double worst = 0.0;
  for (const Operator2* u : {&ur, &ue, &ui}) {
    worst = std::max({worst, transition_probability(*u, p, p), transition_probability(*u, m, m)});
  }
  return {worst <= 1e-12, "max Pr(+-->+-) = " + fmt("%.3g", worst)};
}

Outcome weak_value_closed_forms() {
  std::mt19937_64 gen(20240501);
  std::uniform_real_distribution<double> phi_dist(-0.5 * kPi, 0.5 * kPi);
  std::uniform_real_distribution<double> area_dist(0.05, kPi - 0.05);
  double worst = 0.0;
  int drawn = 0;
  while (drawn < 500) {
    const double phi = phi_dist(gen);
    const double area = area_dist(gen);
    if (resonance_stay_probability(phi, area) < 1e-6) continue;
    ++drawn;
    const double closed = rabi_weak_value_im(phi, area);
    const double direct = rabi_weak_values_direct(phi, area).first.imag();
    worst = std::max(worst, std::abs(closed - direct) / std::max(1.0, std::abs(closed)));
  }
  const double at_quarter = rabi_weak_value_im(0.25 * kPi, 0.5 * kPi);
  const bool ok = worst <= 1e-10 && std::abs(at_quarter + 1.0) <= 1e-12;
  return {ok, "500 draws, max deviation " + fmt("%.3g", worst) + ", value at (pi/4, pi/2) = " +
                  fmt("%.15g", at_quarter)};
}

Outcome first_order_fidelity() {
  const std::vector<double> deltas{1e-2, 5e-3, 2.5e-3};
  const ScanConfig rabi = rabi_scan_config(10.0, 1.0, 0.5 * kPi, 4.0, 16.0, 101);
  const ScanConfig ramsey = ramsey_scan_config(10.0, 1.0, 0.02, 0.5 * kPi, 4.0, 16.0, 101);
  bool ok = true;
  std::string detail;
  for (const auto& [label, cfg] : {std::pair{"rabi", rabi}, std::pair{"ramsey", ramsey}}) {
    const auto table = compare_first_order_exact(cfg, deltas);
    detail += std::string(detail.empty() ? "" : "; ") + label + " ratios";
    for (std::size_t k = 1; k < table.size(); ++k) {
      ok = ok && table[k].ratio >= 3.2 && table[k].ratio <= 4.8;
      detail += " " + fmt("%.4f", table[k].ratio);
    }
  }
  return {ok, detail};
}

Outcome half_width_ratio() {
  const double w0 = 10.0;
  const ScanResult rabi = scan(rabi_scan_config(w0, 1.0, 0.5 * kPi, w0 - 8.0, w0 + 8.0, 2001));
  const ScanResult ramsey = scan(ramsey_scan_config(w0, 1.0, 0.02, 0.5 * kPi, w0 - 8.0, w0 + 8.0, 2001));
  const double ratio = fwhm(ramsey) / fwhm(rabi);
  return {ratio >= 0.54 && ratio <= 0.66, "FWHM ramsey/rabi = " + fmt("%.5f", ratio)};
}

Outcome strength_factor() {
  const double t = 1.0;
  const double eps = 1e-3;
  const ScanConfig rabi = rabi_scan_config(0.0, t, 0.5 * kPi, -1.0, 1.0, 2, eps);
  const ScanConfig ramsey = ramsey_scan_config(0.0, t, 0.02, 0.5 * kPi, -1.0, 1.0, 2, eps);
  const double ratio = ramsey.strength() / rabi.strength();
  const double w1_t = rabi.drive_strength * t;
  const bool ok = std::abs(ratio - w1_t) <= 4e-16 * w1_t && std::abs(ratio - 0.5 * kPi) <= 4e-16 * kPi;
  return {ok, "delta_ramsey/delta_rabi = " + fmt("%.17g", ratio)};
}

Outcome quoted_figures() {
  const UncertaintyReport base = uncertainties(0.58, 7000.0, 130.0, 2.5e9, 0.25 * kPi);
  const UncertaintyReport over = uncertainties(0.58, 7000.0, 130.0, 2.5e9, 0.25 * kPi, 3.71e-5);
  const double rel_d = std::abs(base.sigma_d - 1.34e-26) / 1.34e-26;
  const double rel_w = std::abs(over.sigma_im_weak - 7.42e-5) / 7.42e-5;
  return {rel_d <= 0.10 && rel_w <= 1e-12, "sigma_d = " + fmt("%.4g", base.sigma_d) + " e cm (" +
                                               fmt("%.1f", 100.0 * rel_d) + "% off), sigma_im_weak = " +
                                               fmt("%.12g", over.sigma_im_weak)};
}

Outcome ill_check() {
  std::mt19937_64 gen(7771);
  std::uniform_real_distribution<double> alpha_dist(0.2, 2.0 * kPi - 0.2);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double alpha = (k % 2 == 0 ? 1.0 : -1.0) * alpha_dist(gen);
    const auto [interferometric, ramsey] = ill_equivalence(alpha, -0.5 * kPi);
    worst = std::max(worst, std::abs(interferometric - ramsey) / std::max(1.0, std::abs(ramsey)));
  }
  return {worst <= 1e-12, "20 draws, max deviation " + fmt("%.3g", worst)};
}

Outcome monte_carlo_injection() {
  const double eps_t = 2e-3;
  EdmConfig cfg;
  cfg.model = {0.58, 0.0};
  cfg.T = 130.0;
  cfg.e_field = 7000.0;
  cfg.d_n = edm_from_epsilon(eps_t / cfg.T, cfg.e_field);
  cfg.delta_omega_list = EdmConfig::default_delta_omega(cfg.T);
  cfg.field_pattern = {-1};
  cfg.n_bar = 14000.0;
  cfg.cycles_per_run = 1000;

  constexpr int kSeeds = 100;
  double sum = 0.0, sum_sq = 0.0, counts = 0.0;
  for (int s = 0; s < kSeeds; ++s) {
    cfg.seed = 1000 + static_cast<std::uint64_t>(s);
    const auto cycles = simulate_all(cfg);
    const auto [up, down] = fit_run(cycles, cfg.T);
    const double est = 0.5 * (up.phi_fit + down.phi_fit) * cfg.T;
    sum += est;
    sum_sq += est * est;
    for (const auto& c : cycles) counts += c.n_plus + c.n_minus;
  }
  const double mean = sum / kSeeds;
  const double sd = std::sqrt((sum_sq - kSeeds * mean * mean) / (kSeeds - 1));
  const double predicted = 1.0 / (cfg.model.alpha() * std::sqrt(counts / kSeeds));
  const double bias = std::abs(mean - eps_t) / eps_t;
  const double spread = sd / predicted;
  return {bias <= 0.10 && std::abs(spread - 1.0) <= 0.25,
          "mean eps T = " + fmt("%.5g", mean) + " (bias " + fmt("%.1f", 100.0 * bias) + "%), sd/predicted = " +
              fmt("%.3f", spread)};
}

Operator2 exp_series(const Vec3C& x, int terms) {
  const Operator2 a = kI * pauli_vector(x);
  Operator2 sum = Operator2::identity();
  Operator2 term = Operator2::identity();
  for (int k = 1; k < terms; ++k) {
    term = Complex(1.0 / k) * (term * a);
    sum = sum + term;
  }
  return sum;
}

Outcome oracle_suite() {
  RabiSpec spec;
  spec.omega0 = 10.0;
  spec.omega1 = 1.0;
  spec.omega = 9.5;
  const double t = 2.0;
  const SpinState psi0 = SpinState::plus();
  const SpinState rk = propagate_ode_oracle(RabiLab{spec.omega0, spec.omega1, spec.omega}, psi0, 0.0, t,
                                            default_step(spec.omega, spec.omega0, spec.omega1));
  const double rk_err = distance(rk, rabi_unitary(spec, t) * psi0);

  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double series_err = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Vec3C x{Complex(u(gen), 0.3 * u(gen)), Complex(u(gen), 0.3 * u(gen)), Complex(u(gen), 0.3 * u(gen))};
    series_err = std::max(series_err, max_abs_diff(exp_i_pauli(x), exp_series(x, 30)));
  }

  const double w = 20.0;
  const double r_big = rwa_residual(CosineDrive{w, 0.4, w}, psi0, 5.0);
  const double r_small = rwa_residual(CosineDrive{w, 0.2, w}, psi0, 5.0);
  const double scaling = r_big / r_small;

  const bool ok = rk_err <= 1e-8 && series_err <= 1e-10 && scaling >= 1.0 && scaling <= 4.0;
  return {ok, "rk4 " + fmt("%.2g", rk_err) + ", series " + fmt("%.2g", series_err) +
                  ", rwa residual ratio for doubled w1/w " + fmt("%.3f", scaling)};
}

Outcome determinism(const VerifyOptions& options) {
  if (options.qres_binary.empty()) return {false, "no qres binary configured"};
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("qres_verify_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "edm.cfg");
    cfg << "p_i = 0.8\neps_f = 0.05\nd_n = 1e-25\ne_field = 7000\nT = 130\nn_bar = 14000\n"
           "cycles_per_run = 400\nruns = 2\nseed = 12345\n";
  }
  std::string a, b;
  bool ran = true;
  for (const char* name : {"a.csv", "b.csv"}) {
    const std::string cmd = "\"" + options.qres_binary + "\" edm-simulate --config \"" + (dir / "edm.cfg").string() +
                            "\" --out \"" + (dir / name).string() + "\"";
    ran = ran && std::system(cmd.c_str()) == 0;
  }
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  if (ran) {
    a = slurp(dir / "a.csv");
    b = slurp(dir / "b.csv");
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (!ran) return {false, "edm-simulate failed"};
  return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

struct Check {
  const char* name;
  double budget;
  std::function<Outcome(const VerifyOptions&)> run;
};

const std::vector<Check>& checks() {
  static const std::vector<Check> all{
      {"resonance_nulls", 1.0, [](const VerifyOptions&) { return resonance_nulls(); }},
      {"weak_value_closed_forms", 5.0, [](const VerifyOptions&) { return weak_value_closed_forms(); }},
      {"first_order_fidelity", 10.0, [](const VerifyOptions&) { return first_order_fidelity(); }},
      {"half_width_ratio", 10.0, [](const VerifyOptions&) { return half_width_ratio(); }},
      {"strength_factor", 1.0, [](const VerifyOptions&) { return strength_factor(); }},
      {"quoted_figures", 1.0, [](const VerifyOptions&) { return quoted_figures(); }},
      {"ill_equivalence", 1.0, [](const VerifyOptions&) { return ill_check(); }},
      {"monte_carlo_injection", 120.0, [](const VerifyOptions&) { return monte_carlo_injection(); }},
      {"oracle_suite", 30.0, [](const VerifyOptions&) { return oracle_suite(); }},
      {"determinism", 10.0, [](const VerifyOptions& o) { return determinism(o); }},
  };
  return all;
}

}  // namespace

std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& c : checks()) out.emplace_back(c.name);
  return out;
}

std::vector<CheckResult> run_checks(const std::string& filter, const VerifyOptions& options) {
  std::vector<CheckResult> out;
  int id = 0;
  for (const auto& c : checks()) {
    ++id;
    if (!filter.empty() && std::string(c.name).find(filter) == std::string::npos) continue;
    CheckResult r;
    r.id = id;
    r.name = c.name;
    r.budget_seconds = c.budget;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = c.run(options);
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > r.budget_seconds) {
      r.pass = false;
      r.detail += " [over time budget of " + fmt("%.0f", r.budget_seconds) + " s]";
    }
    out.push_back(std::move(r));
  }
  return out;
}

void print_results(std::ostream& out, const std::vector<CheckResult>& results) {
  char buf[512];
  int passed = 0;
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%s %2d %-24s %8.3f s  %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                  r.seconds, r.detail.c_str());
    out << buf;
    passed += r.pass ? 1 : 0;
  }
  out << passed << "/" << results.size() << " checks passed\n";
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return !results.empty();
}

}  // namespace qres
