#pragma once

#include <array>
#include <vector>

#include "maflow/flow.hpp"
#include "maflow/initial_data.hpp"

namespace maflow {

/// Linearization of the flow about phi = 0 with zero twist and h = 0:
/// phi' = kappa Lap phi with kappa = kHeatKappa, since log det(I + H phi) is
/// tr H phi = (1/4) Lap phi to first order.
inline constexpr double kHeatKappa = 0.25;

/// exp(-4 pi^2 kappa |m|^2 t / L^2) for one Fourier mode.
double heat_factor(const Mode& mode, int n, double period, double t);

/// Exact heat evolution of a mode sum.
Field heat_oracle(const std::vector<Mode>& modes, const TorusGrid& grid, double t);

/// Nonlinear flow from eps * modes against the heat oracle at time t.
struct HeatLimitRow {
  double eps = 0.0;
  double error = 0.0;
  /// error of the previous (twice larger) eps over this one; 0 on the first row.
  double ratio = 0.0;
};

/// Halves eps `count` times starting from eps0. The config must have zero
/// twist and h; its horizon is replaced by t.
std::vector<HeatLimitRow> heat_limit_study(const std::vector<Mode>& modes, const TorusGrid& grid, double eps0,
                                           int count, double t, FlowConfig config);

/// g for which u solves alpha^n det M_t(u) = exp(alpha u + g + h) exactly.
Field manufactured_rhs(const Field& u, double alpha, const TwistSpec& twist, double t, const Field& h);

/// gamma * log|z - z0| on the torus (periodized) and its Lelong number.
struct LelongOracle {
  Field phi;
  double nu = 0.0;
  std::array<double, 4> z0{};
};

LelongOracle lelong_oracle(double gamma, const TorusGrid& grid);

}  // namespace maflow
