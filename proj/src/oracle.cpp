#include "maflow/oracle.hpp"

#include <cmath>
#include <numbers>

#include "maflow/elliptic.hpp"
#include "maflow/geometry.hpp"

namespace maflow {

double heat_factor(const Mode& mode, int n, double period, double t) {
  double m2 = 0.0;
  for (int a = 0; a < 2 * n; ++a) m2 += static_cast<double>(mode.m[a]) * mode.m[a];
  const double w = 2.0 * std::numbers::pi / period;
  return std::exp(-kHeatKappa * w * w * m2 * t);
}

Field heat_oracle(const std::vector<Mode>& modes, const TorusGrid& grid, double t) {
  std::vector<Mode> damped = modes;
  for (auto& m : damped) m.amp *= heat_factor(m, grid.n, grid.period, t);
  return modes_field(damped, grid);
}

std::vector<HeatLimitRow> heat_limit_study(const std::vector<Mode>& modes, const TorusGrid& grid, double eps0,
                                           int count, double t, FlowConfig config) {
  if (config.twist.c != 0.0 || config.twist.has_psi() || !config.h.empty() || config.variant != Variant::CMAF)
    throw InvalidSpec("the heat oracle needs the untwisted flow with h = 0");
  config.T = t;
  config.record_interval = 0.0;
  config.record_times.clear();
  std::vector<HeatLimitRow> rows;
  double eps = eps0;
  for (int k = 0; k < count; ++k, eps *= 0.5) {
    std::vector<Mode> scaled = modes;
    for (auto& m : scaled) m.amp *= eps;
    const Trajectory tr = run(modes_field(scaled, grid), config);
    HeatLimitRow row{eps, sup_distance(tr.records.back().phi, heat_oracle(scaled, grid, t)), 0.0};
    if (!rows.empty()) row.ratio = rows.back().error / row.error;
    rows.push_back(row);
  }
  return rows;
}

Field manufactured_rhs(const Field& u, double alpha, const TwistSpec& twist, double t, const Field& h) {
  return newton_residual(u, alpha, Field(u.grid), twist, t, h);
}

LelongOracle lelong_oracle(double gamma, const TorusGrid& grid) {
  const PotentialSpec spec = PotentialSpec::lelong(gamma);
  spec.validate(grid);
  return {sample_potential(spec, grid), gamma, spec.singular_point(grid)};
}

}  // namespace maflow
