#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "maflow/flow.hpp"
#include "maflow/initial_data.hpp"

namespace maflow {

inline constexpr int kConfigSchema = 1;

/// Run description read from an INI file. Every key is optional except
/// `schema`; unknown sections or keys are a ConfigError.
///
///   schema = 1
///
///   [grid]     n = 1, res = 64, period = 1
///   [initial]  kind = smooth        smooth | lelong | zero_lelong |
///                                   bounded_discontinuous | finite_energy | file
///              modes = (none)       mode list, see parse_modes
///              gamma = 1, exponent = 0.5, depth = 4
///              z0 = (half a cell off the centre)   2n coordinates
///              path = (none)        snapshot for kind = file
///              levels = 3           approximation levels J
///              truncation = 1       truncation step K
///              run = finest         finest | all
///   [flow]     variant = cmaf       cmaf | ncmaf
///              c = 0, psi_modes = (none), h_modes = (none)
///              T = 1, policy = rk4  rk4 | semi_implicit
///              dt_init = 0.01, dt_min = 1e-12, safety = 0.5
///              guard_fraction = 0.5, guard_abs = 1e-10, dealias = false
///              workers = 1
///   [verify]   checks = all         comma list of check names, or all
///              stbelow_a = 0        0 picks the default A
///              tol_<check> = ...    overrides a tolerance
///              lelong_beta = 0.9    beta of the Lelong attenuation check
///              lelong_times = (none)   times checked by it; needs run = all
///   [output]   directory = run      relative to MAFLOW_OUTPUT_ROOT if set
///              record_every = 0, record_interval = 0.1
///              snapshot_times = (none)   extra record times
struct RunConfig {
  TorusGrid grid;
  PotentialSpec initial;
  int levels = 3;
  double truncation = 1.0;
  bool run_all_levels = false;

  Variant variant = Variant::CMAF;
  double c = 0.0;
  std::vector<Mode> psi_modes;
  std::vector<Mode> h_modes;
  double T = 1.0;
  StepPolicy policy = StepPolicy::RK4;
  double dt_init = 1e-2;
  double dt_min = 1e-12;
  double safety = 0.5;
  double guard_fraction = 0.5;
  double guard_abs = 1e-10;
  bool dealias = false;
  int workers = 1;

  std::vector<std::string> checks = {"all"};
  double stbelow_a = 0.0;
  std::map<std::string, double> tolerances;
  double lelong_beta = 0.9;
  std::vector<double> lelong_times;

  std::string directory = "run";
  int record_every = 0;
  double record_interval = 0.1;
  std::vector<double> snapshot_times;

  /// Flow configuration with h and psi_chi sampled on the grid (not yet
  /// prepared).
  FlowConfig flow_config() const;
};

/// Parses and validates. Throws ConfigError with the offending key.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::string& path);

/// Canonical INI text; parse_run_config(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& c);

/// Mode list "amp cos|sin k_x1 k_y1 [k_x2 k_y2], ..." with 2n wavenumbers per
/// mode. Separators between modes (',' or ';') are optional since the arity
/// is fixed. Throws ConfigError.
std::vector<Mode> parse_modes(const std::string& text, int n);
std::string format_modes(const std::vector<Mode>& modes, int n);

/// Names accepted in [verify] checks.
const std::vector<std::string>& known_checks();

}  // namespace maflow
