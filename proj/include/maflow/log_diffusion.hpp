#pragma once

#include <limits>
#include <vector>

#include "maflow/functionals.hpp"
#include "maflow/grid.hpp"

namespace maflow {

/// Density form of the one-variable flow with zero twist and h = 0.
///
/// With f = det(I + H phi) = 1 + (1/4) Lap phi the potential flow
/// phi' = log f becomes f' = (1/4) Lap log f. This module integrates
///   df/dtau = Lap log f,   tau = kLogDiffusionTimeScale * t.
inline constexpr double kLogDiffusionTimeScale = 0.25;

/// f = det(I + H phi). Requires n = 1; throws KaehlerConeViolation if f <= 0.
Field potential_to_density(const Field& phi);

/// Mean-zero phi with det(I + H phi) = f. Throws MassMismatch unless
/// int f = V to relative 1e-10, InvalidSpec unless n = 1 and f > 0.
Field density_to_potential(const Field& f);

/// Lap log f. Throws PositivityLoss if f <= 0 somewhere.
Field logfd_rhs(const Field& f);

struct LogDiffusionConfig {
  double T = 0.25;
  double dt_init = 1e-2;
  double dt_min = 1e-12;
  double safety = 0.5;
  double record_interval = 0.0;
  std::vector<double> record_times;
};

struct DensityState {
  double tau = 0.0;
  Field f;
  long step_count = 0;
  double dt = 0.0;
};

/// min(dt_init, safety * h^2 * min f / 16).
double logfd_dt(const Field& f, const LogDiffusionConfig& config);

/// One RK4 step of length <= dt_cap. The step is halved while the result has
/// a nonpositive or non-finite value; PositivityLoss below dt_min.
DensityState step_logfd(const DensityState& state, const LogDiffusionConfig& config,
                        double dt_cap = std::numeric_limits<double>::infinity());

struct DensityRecord {
  double tau = 0.0;
  Field f;
};

struct DensityTrajectory {
  std::vector<DensityRecord> records;
  /// Density columns (fmin, fmax, f_l2, orlicz_xlogx, vol, dt) of the shared
  /// series schema; potential columns are NaN.
  FunctionalSeries series;
  long steps = 0;
  long rejected = 0;

  const DensityRecord* at(double tau) const;
};

/// Integrates from f0 at tau = 0 to config.T, landing on every record time.
DensityTrajectory run_logfd(const Field& f0, const LogDiffusionConfig& config);

}  // namespace maflow
