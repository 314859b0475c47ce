#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "qres/config.hpp"
#include "qres/edm.hpp"
#include "qres/error.hpp"
#include "qres/scan.hpp"
#include "qres/verify.hpp"
#include "qres/weak.hpp"

namespace qres::cli {
namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << data;
  out.flush();
  if (!out) throw InvalidArgument("write failed for " + path);
}

json fit_json(const RunFit& f) {
  return {{"n_bar", f.n_bar_fit},
          {"alpha", f.alpha_fit},
          {"phi", f.phi_fit},
          {"residual", f.residual},
          {"converged", f.converged}};
}

}  // namespace

int run_scan(const ScanArgs& a) {
  const ScanConfig cfg = parse_scan_config(read_file(a.config), a.overrides);
  const ScanResult result = scan(cfg);
  std::ostringstream out;
  write_scan_csv(out, result);
  write_file(a.out, out.str());
  return 0;
}

int run_weak(const WeakArgs& a) {
  if (!std::isfinite(a.phi) || !std::isfinite(a.area)) throw InvalidArgument("--phi and --area must be finite");
  json rec;
  rec["mode"] = a.mode;
  rec["phi"] = a.phi;
  rec["pulse_area"] = a.area;
  rec["pr0"] = resonance_stay_probability(a.phi, a.area);
  const double im_l = rabi_weak_value_im(a.phi, a.area);
  if (a.mode == "rabi") {
    rec["im_sigma2_L"] = im_l;
    rec["im_sigma2_R"] = -im_l;
  } else {
    const Complex w = ramsey_weak_value(a.phi, a.area);
    rec["sigma3_w"] = {{"re", w.real()}, {"im", w.imag()}};
    rec["im_sigma2_L"] = im_l;
  }
  std::cout << rec.dump(2) << "\n";
  return 0;
}

int run_simulate(const SimulateArgs& a) {
  std::vector<std::string> overrides = a.overrides;
  if (a.has_seed) overrides.push_back("seed = " + std::to_string(a.seed));
  const EdmConfig cfg = parse_edm_config(read_file(a.config), overrides);
  const auto cycles = simulate_all(cfg);
  std::ostringstream out;
  write_cycles_csv(out, cycles);
  write_file(a.out, out.str());
  return 0;
}

int run_analyze(const AnalyzeArgs& a) {
  const EdmConfig cfg = parse_edm_config(read_file(a.config), a.overrides);
  std::istringstream in(read_file(a.cycles));
  const auto cycles = read_cycles_csv(in);
  const auto fits = fit_all_runs(cycles, cfg);

  json out;
  json up = json::array();
  json down = json::array();
  bool converged = true;
  double alpha_sum = 0.0;
  for (const auto& [u, d] : fits) {
    up.push_back(fit_json(u));
    down.push_back(fit_json(d));
    converged = converged && u.converged && d.converged;
    alpha_sum += u.alpha_fit + d.alpha_fit;
  }
  out["spin_up"] = up;
  out["spin_down"] = down;

  const EdmEstimate est = estimate_edm(cycles, fits, cfg);
  out["edm_estimate_ecm"] = est.d_ecm;
  out["used_cycles"] = est.used_cycles;
  out["dropped_cycles"] = est.dropped_cycles;

  json weak = json::array();
  double counts = 0.0;
  double phase_sum = 0.0;
  for (const auto& c : cycles) {
    counts += c.n_plus + c.n_minus;
    const RunFit& fit = fits[c.j / cfg.cycles_per_run].first;
    phase_sum += std::abs(0.5 * (c.delta_omega - fit.phi_fit) * cfg.T);
    try {
      weak.push_back(weak_value_from_run(fit, c.delta_omega, cfg.T));
    } catch (const Diverged&) {
      weak.push_back(nullptr);
    }
  }
  const double alpha = alpha_sum / (2.0 * static_cast<double>(fits.size()));
  const UncertaintyReport unc =
      uncertainties(alpha, cfg.e_field, cfg.T, counts, phase_sum / static_cast<double>(cycles.size()));
  out["sigma_d_ecm"] = unc.sigma_d;
  out["sigma_phi_t"] = unc.sigma_phi_t;
  out["im_weak_values"] = weak;
  out["sigma_im_weak"] = unc.sigma_im_weak;
  write_file(a.out, out.dump(2) + "\n");

  if (!converged) {
    std::cerr << "error: fringe fit did not converge for at least one run\n";
    return 3;
  }
  return 0;
}

int run_verify(const VerifyArgs& a) {
  VerifyOptions options;
  options.qres_binary = a.binary;
  const auto results = run_checks(a.filter, options);
  if (results.empty()) {
    std::cerr << "error: no check matches '" << a.filter << "'\n";
    return 2;
  }
  print_results(std::cout, results);
  return all_passed(results) ? 0 : 1;
}

}  // namespace qres::cli
