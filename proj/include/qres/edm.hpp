#ifndef QRES_EDM_HPP
#define QRES_EDM_HPP

// Ramsey-type neutron EDM measurement with imperfect state selection:
// synthetic counting cycles, per-run fringe fits and EDM extraction.
//
// Fringe model per cycle j (w2 tau = pi/2):
//   N+- = N (1 -+ alpha cos((dw - eps_j) T)),  dw = w - w0_bar,
// with eps_j = -field_sign * 2 d_n E0 e / hbar. Parallel fields (+1) lower
// the precession frequency.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace qres {

inline constexpr double kHbar = 1.054571817e-34;           // J s
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C

/// Frequency shift in rad/s of an EDM d (e cm) in a field E (V/cm):
/// 2 d E e / hbar.
double epsilon_from_edm(double d_ecm, double e_field_v_per_cm);
/// Inverse of epsilon_from_edm.
double edm_from_epsilon(double epsilon, double e_field_v_per_cm);

struct ImperfectionModel {
  double p_i = 1.0;    ///< polarization of the initial mixed state
  double eps_f = 0.0;  ///< detection error of the POVM

  double alpha() const { return p_i * (1.0 - 2.0 * eps_f); }
  /// Throws InvalidConfig unless both fields lie in [0, 1].
  void validate() const;
};

enum class Spin { up, down };

/// (1 -+ alpha cos(2 phi - eps T)) / 2, phi = (w - w0_bar) T/2.
double detection_probability(const ImperfectionModel& model, double phi, double eps_t, Spin spin);

/// The same probability assembled from the mixed initial state, the POVM
/// elements and the four pure-state probabilities of the idealized Ramsey
/// propagator at w2 tau = pi/2.
double detection_probability_explicit(const ImperfectionModel& model, double phi, double eps_t, Spin spin);

/// (1/2)[1 -+ alpha (1 - 2 Pr++(0) + 2 eps T Pr++(0) Im s3^W)].
double first_order_detection(const ImperfectionModel& model, double phi, double eps_t, Spin spin);

struct EdmConfig {
  ImperfectionModel model{};
  double omega_bar0 = 0.0;
  double d_n = 0.0;          ///< injected EDM, e cm
  double e_field = 0.0;      ///< V/cm
  double omega2_tau = 1.5707963267948966;
  double T = 1.0;
  double tau = 0.0;
  std::vector<double> delta_omega_list;  ///< cycled over j
  std::vector<int> field_pattern;        ///< +1 parallel, -1 antiparallel; cycled over j
  double n_bar = 1.0;
  std::size_t cycles_per_run = 1;
  std::size_t runs = 1;
  std::uint64_t seed = 0;

  /// +-(pi/(2T)) {0.8, 1.2}: four points around the steepest fringe slopes.
  static std::vector<double> default_delta_omega(double T);
  static std::vector<int> default_field_pattern();

  std::size_t total_cycles() const { return cycles_per_run * runs; }
  double delta_omega(std::size_t j) const { return delta_omega_list[j % delta_omega_list.size()]; }
  int field_sign(std::size_t j) const { return field_pattern[j % field_pattern.size()]; }
  /// |epsilon| in rad/s from d_n and e_field.
  double epsilon_magnitude() const { return epsilon_from_edm(d_n, e_field); }
  /// Throws InvalidConfig listing every violated invariant.
  void validate() const;
};

struct CycleRecord {
  std::size_t j = 0;
  double delta_omega = 0.0;
  int field_sign = 1;
  /// Counts are integers when simulated; fractional values are accepted so
  /// noiseless expectations can be fed to the fit.
  double n_plus = 0.0;
  double n_minus = 0.0;
};

/// Poisson counts for cycle j. The generator is std::mt19937_64 seeded with
/// splitmix64(seed ^ splitmix64(j)), so every cycle is reproducible alone.
CycleRecord simulate_cycle(const EdmConfig& config, std::size_t j);
/// All cycles 0 .. total_cycles()-1, simulated in parallel.
std::vector<CycleRecord> simulate_all(const EdmConfig& config);

/// Expected counts N+- of one cycle without noise.
std::pair<double, double> expected_counts(const EdmConfig& config, double delta_omega, int field_sign);

struct RunFit {
  double n_bar_fit = 0.0;
  double alpha_fit = 0.0;
  double phi_fit = 0.0;   ///< Phi in rad/s, wrapped into [-pi/T, pi/T)
  double residual = 0.0;  ///< root mean square count residual
  bool converged = false;
};

/// Independent fits of N+- = N (1 -+ alpha cos((dw - Phi) T)) per spin
/// channel: 256-point grid in Phi with linear least squares for (N, N alpha),
/// then Gauss-Newton. Throws InsufficientData for fewer than 4 cycles or
/// fewer than 3 distinct dw. A fit that does not settle within 50 iterations
/// is returned with converged = false.
std::pair<RunFit, RunFit> fit_run(const std::vector<CycleRecord>& cycles, double T);

/// Per-cycle shift eps = dw - Phi - theta/T with cos(theta) = -+(N - N)/(N alpha),
/// choosing the branch with the smallest |eps|. Throws OutOfRange when the
/// cosine exceeds 1 by more than 1e-9.
double extract_cycle_phase(const CycleRecord& cycle, const RunFit& fit, double T, Spin spin);

struct EdmEstimate {
  double d_ecm = 0.0;
  std::size_t used_cycles = 0;
  std::size_t dropped_cycles = 0;
};

/// d = hbar (mean eps over antiparallel - mean eps over parallel) / (4 E0 e).
/// fits[r] belongs to cycles with j / cycles_per_run == r. Cycles whose phase
/// cannot be inverted are dropped. Throws MissingFieldSign unless both field
/// signs remain.
EdmEstimate estimate_edm(const std::vector<CycleRecord>& records, const std::vector<std::pair<RunFit, RunFit>>& fits,
                         const EdmConfig& config);

/// Fits every run of consecutive cycles_per_run records.
std::vector<std::pair<RunFit, RunFit>> fit_all_runs(const std::vector<CycleRecord>& records, const EdmConfig& config);

/// cot(phi) with phi = (dw - Phi) T/2. Throws Diverged at the fringe center.
double weak_value_from_run(const RunFit& fit, double delta_omega, double T);

struct UncertaintyReport {
  double sigma_phi_t = 0.0;    ///< 1/(alpha sqrt(N))
  double sigma_d = 0.0;        ///< hbar/(2 alpha E0 e T sqrt(N)), e cm
  double sigma_im_weak = 0.0;  ///< csc^2(phi) sigma_phi_t
};

UncertaintyReport uncertainties(double alpha, double e_field, double T, double n_total, double phi,
                                std::optional<double> sigma_phi_t_override = std::nullopt);

/// j,delta_omega,field_sign,n_plus,n_minus with 17 significant digits.
void write_cycles_csv(std::ostream& out, const std::vector<CycleRecord>& cycles);
/// Throws ParseError with the offending line number.
std::vector<CycleRecord> read_cycles_csv(std::istream& in);

}  // namespace qres

#endif  // QRES_EDM_HPP
