#ifndef QRES_SCAN_HPP
#define QRES_SCAN_HPP

// Frequency sweeps over the Rabi and Ramsey resonances.

#include <cstddef>
#include <ostream>
#include <vector>

namespace qres {

enum class ScanMode { rabi, ramsey };

struct ScanConfig {
  ScanMode mode = ScanMode::rabi;
  double omega_bar0 = 0.0;
  double drive_strength = 1.0;  ///< w1 (rabi) or w2 (ramsey)
  double t_or_T = 1.0;          ///< pulse length t (rabi) or free precession T (ramsey)
  double tau = 0.0;             ///< ramsey pulse length, both halves together
  double pulse_area = 1.0;      ///< w1 t or w2 tau
  double omega_min = -1.0;
  double omega_max = 1.0;
  std::size_t steps = 101;
  double epsilon = 0.0;

  /// Drive length that carries the pulse area: t for rabi, tau for ramsey.
  double pulse_length() const { return mode == ScanMode::rabi ? t_or_T : tau; }
  /// Measurement strength epsilon/w1 (rabi) or epsilon T (ramsey).
  double strength() const;
  /// Grid point i of steps, with the last point exactly omega_max.
  double omega_at(std::size_t i) const;
  /// Throws InvalidConfig listing every violated invariant.
  void validate() const;
};

/// Matched comparison: Rabi with pulse length t, Ramsey with T = t and a short
/// pulse tau, both with the same area. Drive strengths follow from the area.
ScanConfig rabi_scan_config(double omega_bar0, double t, double pulse_area, double omega_min, double omega_max,
                            std::size_t steps, double epsilon = 0.0);
ScanConfig ramsey_scan_config(double omega_bar0, double T, double tau, double pulse_area, double omega_min,
                              double omega_max, std::size_t steps, double epsilon = 0.0);

struct ScanRow {
  double omega = 0.0;
  double pr_flip = 0.0;         ///< |<-|U|+>|^2, exact propagation
  double pr_stay = 0.0;         ///< |<+|U|+>|^2, exact propagation
  double pr_first_order = 0.0;  ///< Pr(0)(1 + delta Im s_{2,L}^W)
  double im_weak = 0.0;         ///< Im s_{2,L}^W; 0 when diverged
  double strength = 0.0;
  bool diverged = false;
};

struct ScanResult {
  ScanConfig config;
  std::vector<ScanRow> rows;
};

/// Exact propagation at every grid frequency. Rabi rows use the rotating
/// frame closed form; Ramsey rows use the piecewise propagator with detuned
/// pulses. Rows are computed in parallel and stored by index.
ScanResult scan(const ScanConfig& config);

/// Full width at half maximum of pr_flip by linear interpolation between the
/// bracketing grid points. Throws NoPeak when the maximum sits on the grid
/// edge, the half level is never crossed, or a second point outside the
/// central lobe reaches the peak height.
double fwhm(const ScanResult& result);

struct ResidualRow {
  double delta = 0.0;
  double max_residual = 0.0;
  /// previous max_residual / this one; 0 for the first row.
  double ratio = 0.0;
};

/// For each delta (>= 0, strictly descending) the largest |Pr_exact -
/// Pr_first_order| over the grid, skipping rows whose weak value diverges.
/// epsilon is delta w1 (rabi) or delta/T (ramsey); config.epsilon is ignored.
/// The first-order value comes from the general weak-value expansion of
/// the same dynamics: for rabi H0 = w1(s1 + phi s3) with V = -(epsilon/2) s3,
/// for ramsey the free precession with the pulses at omega0_bar.
std::vector<ResidualRow> compare_first_order_exact(const ScanConfig& config, const std::vector<double>& deltas);

struct SensitivityRow {
  double omega = 0.0;
  double dn_plus = 0.0;   ///< dN+/dw =  N alpha T sin((w - w0) T)
  double dn_minus = 0.0;  ///< dN-/dw = -N alpha T sin((w - w0) T)
};

/// Counting sensitivity over the scan grid, with T = config.t_or_T and
/// w0 = omega_bar0 + epsilon.
std::vector<SensitivityRow> sensitivity_curve(const ScanConfig& config, double alpha, double n_bar);

/// omega,pr_flip,pr_stay,pr_first_order,im_weak,strength,diverged with
/// 17 significant digits and LF line endings.
void write_scan_csv(std::ostream& out, const ScanResult& result);

}  // namespace qres

#endif  // QRES_SCAN_HPP
