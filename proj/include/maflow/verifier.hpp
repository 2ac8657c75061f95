#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "maflow/flow.hpp"
#include "maflow/initial_data.hpp"

namespace maflow {

enum class VerdictStatus { Pass, Fail, Skipped };
std::string to_string(VerdictStatus s);

/// Outcome of one check. `slack` is the worst signed margin over the scanned
/// (t, x); the check passes when slack >= -tolerance.
struct VerdictReport {
  std::string name;
  /// The inequality being checked.
  std::string anchor;
  double slack = 0.0;
  double t = 0.0;
  std::size_t index = 0;
  double tolerance = 0.0;
  /// Hypothesis the check depends on, e.g. "twist sign zero" or "bounded data".
  std::string gated_on;
  VerdictStatus status = VerdictStatus::Pass;
  /// Advisory checks never fail a suite.
  bool advisory = false;
  /// Free-form detail: skip reason, diagnostic values.
  std::string note;

  bool passed() const { return status != VerdictStatus::Fail; }
};

/// A recorded run together with what the checks need to know about it.
/// Records must carry phi and phi_dot; the config should be prepared.
struct RunData {
  Trajectory traj;
  FlowConfig config;
  PotentialKind data = PotentialKind::Smooth;
};

namespace tolerance {
inline constexpr double comparison = 1e-6;
inline constexpr double sup_bound = 1e-6;
inline constexpr double minoinf = 1e-6;
inline constexpr double clef = 1e-5;
inline constexpr double stbelow = 1e-6;
inline constexpr double density = 1e-5;
inline constexpr double lelong = 0.05;
inline constexpr double ncmaf = 1e-5;
inline constexpr double semigroup = 1e-8;
inline constexpr double osc_spread = 0.1;
}  // namespace tolerance

/// min over (t, x) of psi_t - phi_t. ConfigMismatch when the runs do not
/// share grid and record times.
VerdictReport verify_comparison(const RunData& low, const RunData& high, double tol = tolerance::comparison);

/// sup phi_t <= sup phi_0 + (n log 2 - inf h) t, read from the series.
VerdictReport verify_sup_bound(const RunData& run, double tol = tolerance::sup_bound);

/// Constant of the lower bound below: sup h + n (log 4n - 1), the smallest
/// value making -1/(2 sqrt t) - C < (n/2) log t - n log 2 - sup h on (0, 1].
double minoinf_constant(int n, double sup_h);

/// (1 - sqrt t)(phi_0 - inf phi_0 + 1) - C t + inf phi_0 - 1 <= phi_t for
/// t <= min(T, 1). Bounded data only.
VerdictReport verify_minoinf(const RunData& run, double tol = tolerance::minoinf);

/// H = t phi_dot - (phi_t - phi_0) - n t <= 0.
VerdictReport verify_clef(const RunData& run, double tol = tolerance::clef);

/// Default A for the lower bound on phi_dot: 2 / (T_max - T), or 1 when
/// T_max is infinite.
double stbelow_default_a(const FlowConfig& config);

/// Constant C for phi_dot >= n log t - A Osc(phi_0) - C with A = 1,
/// calibrated once on `stbelow_reference_run` (smallest C >= 0) and frozen.
inline constexpr double kStbelowC = 0.0;

/// phi_dot_t >= n log(t - t0) - A Osc(phi_{t0}) - C over records with
/// t > t0, where t0 is the first record time. Bounded data only.
VerdictReport verify_stbelow(const RunData& run, double A, double C = kStbelowC, double tol = tolerance::stbelow);

/// Smallest C making verify_stbelow pass with zero slack.
double calibrate_stbelow(const RunData& run, double A);

/// The smooth run kStbelowC was calibrated on.
RunData stbelow_reference_run();

/// Twist sign zero or nonpositive: sup f_t and int f log(1+f) dmu are
/// nonincreasing between consecutive records.
VerdictReport verify_density_monotone(const RunData& run, double tol = tolerance::density);

/// Twist sign zero or nonnegative: inf f_t is nondecreasing.
VerdictReport verify_density_min(const RunData& run, double tol = tolerance::density);

/// Lelong attenuation over the runs of an approximation sequence.
struct LelongAttenuationInput {
  const ApproximationSequence* seq = nullptr;
  /// One run per level, sharing record times.
  const std::vector<Trajectory>* runs = nullptr;
  FlowConfig config;
  double gamma = 1.0;
  double beta = 0.9;
  /// Times at which the Lelong estimate of the finest level is checked.
  std::vector<double> times;
};

/// Two slacks, reported as two verdicts:
///   subsolution: (1 - 2 beta t) phi_0 + 2 beta t u + n (t log t - t) <= phi_t
///     on every level for t <= 1/(2 beta), with u solving
///     (2 beta)^n det(I + H u) = exp(2 beta u - 2 beta phi_0 + h);
///   lelong: nu(phi_t) <= max(1 - 2 beta t, 0) gamma + 0.05 gamma.
/// The lelong verdict note also lists max f and ||f||_2 across levels.
std::vector<VerdictReport> verify_lelong_attenuation(const LelongAttenuationInput& in,
                                                     double tol = tolerance::lelong);

/// H = (1 - e^-t) phi_dot - (phi_t - phi_0) - n t <= 0 for the normalized flow.
VerdictReport verify_ncmaf_bound(const RunData& run, double tol = tolerance::ncmaf);

/// A run restarted from the record at time s of `direct` must reproduce it
/// at every shared time to 1e-8; the restarted run then gets verify_stbelow
/// with Osc(phi_s).
std::vector<VerdictReport> verify_minodot(const RunData& direct, const RunData& restarted, double A,
                                          double C = kStbelowC);

/// Advisory: max over t of t log tr(M_t) / (Osc(phi_{t/2}) + 1), with
/// phi_{t/2} taken from the nearest record at or below t/2.
VerdictReport verify_c2_diagnostic(const RunData& run);

/// Relative spread (max - min) / max of Osc(phi_t) across levels at every
/// shared record time after the first. Zero-Lelong data only.
VerdictReport verify_oscillation_spread(const std::vector<Trajectory>& runs, PotentialKind data,
                                        double tol = tolerance::osc_spread);

/// Every check that applies to a single run, gated by its variant, twist
/// sign and data class.
std::vector<VerdictReport> verify_run(const RunData& run);

bool all_passed(const std::vector<VerdictReport>& reports);

}  // namespace maflow
