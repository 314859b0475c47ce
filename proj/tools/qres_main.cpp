#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "qres/error.hpp"

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  verify: at least one check failed\n"
    "  2  invalid arguments, config or input file\n"
    "  3  numerical failure (divergence, insufficient data, fit non-convergence)\n"
    "\n"
    "QRES_THREADS caps the number of worker threads.";

std::string self_path(const char* argv0) {
  std::error_code ec;
  const auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
  return ec ? std::string(argv0) : p.string();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qres::cli;
  CLI::App app{"qres: resonance and weak-value simulator"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  ScanArgs scan;
  auto* s = app.add_subcommand("scan", "frequency sweep of a Rabi or Ramsey resonance to CSV");
  s->add_option("--config", scan.config, "scan config file")->required();
  s->add_option("--out", scan.out, "output CSV")->required();
  s->add_option("--set", scan.overrides, "override key=value (repeatable)");

  WeakArgs weak;
  auto* w = app.add_subcommand("weak", "print the closed-form weak values as JSON");
  w->add_option("--phi", weak.phi, "detuning phase (rad)")->required();
  w->add_option("--area", weak.area, "pulse area (rad)")->required();
  w->add_option("--mode", weak.mode, "rabi or ramsey")->check(CLI::IsMember({"rabi", "ramsey"}));

  SimulateArgs sim;
  auto* es = app.add_subcommand("edm-simulate", "simulate EDM counting cycles to CSV");
  es->add_option("--config", sim.config, "EDM config file")->required();
  es->add_option("--out", sim.out, "output cycle CSV")->required();
  es->add_option("--set", sim.overrides, "override key=value (repeatable)");
  auto* seed_opt = es->add_option("--seed", sim.seed, "RNG seed, overrides the config");

  AnalyzeArgs ana;
  auto* ea = app.add_subcommand("edm-analyze", "fit cycle CSV and estimate the EDM to JSON");
  ea->add_option("--cycles", ana.cycles, "cycle CSV from edm-simulate")->required();
  ea->add_option("--config", ana.config, "EDM config file")->required();
  ea->add_option("--out", ana.out, "output JSON")->required();
  ea->add_option("--set", ana.overrides, "override key=value (repeatable)");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "run the built-in acceptance checks");
  v->add_option("--filter", ver.filter, "run only checks whose name contains this substring");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*s) return run_scan(scan);
    if (*w) return run_weak(weak);
    if (*es) {
      sim.has_seed = seed_opt->count() > 0;
      return run_simulate(sim);
    }
    if (*ea) return run_analyze(ana);
    if (*v) {
      ver.binary = self_path(argv[0]);
      return run_verify(ver);
    }
  } catch (const qres::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qres::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
