#ifndef QRES_TOOLS_COMMANDS_HPP
#define QRES_TOOLS_COMMANDS_HPP

#include <string>
#include <vector>

namespace qres::cli {

struct ScanArgs {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
};

struct WeakArgs {
  double phi = 0.0;
  double area = 0.0;
  std::string mode = "rabi";
};

struct SimulateArgs {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
  bool has_seed = false;
  unsigned long long seed = 0;
};

struct AnalyzeArgs {
  std::string cycles;
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
};

struct VerifyArgs {
  std::string filter;
  std::string binary;
};

// Each returns the process exit code; library exceptions propagate.
int run_scan(const ScanArgs& a);
int run_weak(const WeakArgs& a);
int run_simulate(const SimulateArgs& a);
int run_analyze(const AnalyzeArgs& a);
int run_verify(const VerifyArgs& a);

}  // namespace qres::cli

#endif  // QRES_TOOLS_COMMANDS_HPP
