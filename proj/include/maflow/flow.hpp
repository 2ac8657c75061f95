#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "maflow/functionals.hpp"
#include "maflow/grid.hpp"
#include "maflow/initial_data.hpp"
#include "maflow/twist.hpp"

namespace maflow {

enum class Variant { CMAF, NCMAF };
enum class StepPolicy { RK4, SemiImplicit };

std::string to_string(Variant v);
std::string to_string(StepPolicy p);

/// CMAF:  phi' = log det M_t(phi) - h
/// NCMAF: phi' = log det(I + H(phi)) - h + phi   (c = 0, psi_chi = 0 only)
struct FlowConfig {
  Variant variant = Variant::CMAF;
  /// Density exponent of mu = e^h omega^n; empty means h = 0.
  Field h;
  TwistSpec twist;
  double T = 1.0;
  StepPolicy policy = StepPolicy::RK4;
  double dt_init = 1e-2;
  double dt_min = 1e-12;
  double safety = 0.5;
  /// A tentative step is rejected when min_eig drops below
  /// max(guard_abs, guard_fraction * current min_eig).
  double guard_fraction = 0.5;
  double guard_abs = 1e-10;
  /// Record every k accepted steps (0: off).
  int record_every = 0;
  /// Record at multiples of this time (0: off).
  double record_interval = 0.0;
  /// Extra record times; steps are shortened to land on them exactly.
  std::vector<double> record_times;
  /// Keep phi and phi_dot at every record (otherwise only the series).
  bool keep_fields = true;
  /// Apply the 2/3 rule to the right-hand side.
  bool dealias = false;

  /// Checks the invariants for `grid` and returns a copy with h renormalized
  /// to int e^h = V. Throws InvalidSpec.
  FlowConfig prepared(const TorusGrid& grid) const;
};

/// h - log((1/V) int e^h).
Field normalize_density_exponent(const Field& h);

struct FlowState {
  double t = 0.0;
  Field phi;
  Field phi_dot;
  double min_eig = 0.0;
  long step_count = 0;
  double dt = 0.0;
};

/// Right-hand side at (t, phi). Throws KaehlerConeViolation.
Field rhs(double t, const Field& phi, const FlowConfig& config);

/// State at time t with phi_dot and min_eig filled in.
FlowState make_state(double t, Field phi, const FlowConfig& config);

/// Step size the policy picks in `state`, before landing adjustments.
double policy_dt(const FlowState& state, const FlowConfig& config);

/// One accepted step of length <= dt_cap. Halves the step on rejection;
/// throws StepSizeUnderflow below dt_min.
FlowState step(const FlowState& state, const FlowConfig& config,
               double dt_cap = std::numeric_limits<double>::infinity());

struct TrajectoryRecord {
  double t = 0.0;
  long step = 0;
  double min_eig = 0.0;
  Field phi;
  Field phi_dot;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  FunctionalSeries series;
  long steps = 0;
  long rejected = 0;

  /// Record whose time equals t to 1e-12, or nullptr.
  const TrajectoryRecord* at(double t) const;
};

/// Integrates from (t0, phi0) to config.T. Errors carry the failure time.
Trajectory run(const Field& phi0, const FlowConfig& config, double t0 = 0.0);

/// Runs every level of an approximation sequence, using up to `workers`
/// threads.
std::vector<Trajectory> run_levels(const ApproximationSequence& seq, const FlowConfig& config,
                                   int workers = 1);

struct LimitReport {
  Field phi;
  /// ||phi_{t,j} - phi_{t,j+1}||_inf for consecutive levels.
  std::vector<double> decrements;
  /// decrements[k+1] / decrements[k].
  std::vector<double> ratios;
  bool converged = false;
  /// Largest phi_{t,j+1} - phi_{t,j}; <= 0 for a decreasing family.
  double max_increase = 0.0;
};

/// Finest level at time t plus the Cauchy decrements. `converged` when every
/// ratio is <= ratio_bound.
LimitReport limit_potential(const std::vector<Trajectory>& levels, double t, double ratio_bound = 0.7);

}  // namespace maflow
