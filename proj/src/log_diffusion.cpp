#include "maflow/log_diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "maflow/geometry.hpp"
#include "maflow/spectral.hpp"

namespace maflow {

namespace {

void require_one_variable(const TorusGrid& g) {
  if (g.n != 1) throw InvalidSpec("the density form is only available for n = 1");
}

FunctionalRow density_row(const Field& f, double tau, double dt) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  FunctionalRow r;
  r.t = tau;
  r.sup = r.inf = r.osc = r.I = r.E = r.min_eig = nan;
  r.fmin = f.min();
  r.fmax = f.max();
  r.f_l2 = lp_norm(f, 2.0, Field());
  r.orlicz = orlicz_integral(f, orlicz_xlogx, Field());
  r.vol = integrate(f);
  r.dt = dt;
  return r;
}

}  // namespace

Field potential_to_density(const Field& phi) {
  require_one_variable(phi.grid);
  return ma_ratio(phi, TwistSpec{}, 0.0);
}

Field density_to_potential(const Field& f) {
  require_one_variable(f.grid);
  if (!(f.min() > 0.0) || !f.all_finite()) throw InvalidSpec("density must be positive and finite");
  const double mass = integrate(f);
  const double V = f.grid.volume();
  if (std::abs(mass - V) > 1e-10 * V)
    throw MassMismatch("int f = " + std::to_string(mass) + " but the volume is " + std::to_string(V));
  // tr H(phi) = f - 1 with zero mean.
  return spectral_for(f.grid).solve_shifted(f + (-1.0), 1.0, 0.0);
}

Field logfd_rhs(const Field& f) {
  Field l(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] > 0.0)) throw PositivityLoss("density " + std::to_string(f[i]) + " at gridpoint " + std::to_string(i));
    l[i] = std::log(f[i]);
  }
  return spectral_for(f.grid).laplacian(l);
}

double logfd_dt(const Field& f, const LogDiffusionConfig& config) {
  const double h = f.grid.spacing();
  return std::min(config.dt_init, config.safety * h * h * f.min() / 16.0);
}

namespace {

struct Outcome {
  DensityState state;
  int rejected = 0;
};

Outcome step_counted(const DensityState& s, const LogDiffusionConfig& config, double dt_cap) {
  double dt = std::min(logfd_dt(s.f, config), dt_cap);
  int rejected = 0;
  const Field k1 = logfd_rhs(s.f);
  for (;;) {
    if (dt < config.dt_min && dt < dt_cap)
      throw PositivityLoss("step size " + std::to_string(dt) + " below dt_min while keeping f > 0");
    try {
      const Field k2 = logfd_rhs(axpy(s.f, 0.5 * dt, k1));
      const Field k3 = logfd_rhs(axpy(s.f, 0.5 * dt, k2));
      const Field k4 = logfd_rhs(axpy(s.f, dt, k3));
      Field next = s.f;
      const double w = dt / 6.0;
      for (std::size_t i = 0; i < next.size(); ++i) next[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (next.all_finite() && next.min() > 0.0) {
        DensityState out{s.tau + dt, std::move(next), s.step_count + 1, dt};
        return {std::move(out), rejected};
      }
    } catch (const PositivityLoss&) {
    }
    ++rejected;
    dt *= 0.5;
  }
}

}  // namespace

DensityState step_logfd(const DensityState& state, const LogDiffusionConfig& config, double dt_cap) {
  require_one_variable(state.f.grid);
  return step_counted(state, config, dt_cap).state;
}

const DensityRecord* DensityTrajectory::at(double tau) const {
  for (const auto& r : records)
    if (std::abs(r.tau - tau) <= 1e-12 * std::max(1.0, std::abs(tau))) return &r;
  return nullptr;
}

DensityTrajectory run_logfd(const Field& f0, const LogDiffusionConfig& config) {
  require_one_variable(f0.grid);
  if (!(config.T >= 0.0) || !std::isfinite(config.T)) throw InvalidSpec("horizon must be finite and >= 0");
  if (!(config.dt_min > 0.0) || !(config.dt_init >= config.dt_min)) throw InvalidSpec("need 0 < dt_min <= dt_init");
  if (!(config.safety > 0.0 && config.safety <= 1.0)) throw InvalidSpec("safety factor must lie in (0, 1]");
  if (!(f0.min() > 0.0) || !f0.all_finite()) throw PositivityLoss("initial density must be positive and finite");

  std::set<double> schedule;
  for (double t : config.record_times)
    if (t > 0.0 && t <= config.T) schedule.insert(t);
  if (config.record_interval > 0.0)
    for (long k = 1;; ++k) {
      const double t = static_cast<double>(k) * config.record_interval;
      if (t > config.T * (1.0 + 1e-14)) break;
      schedule.insert(std::min(t, config.T));
    }
  if (config.T > 0.0) schedule.insert(config.T);

  DensityTrajectory traj;
  DensityState s{0.0, f0, 0, 0.0};
  auto record = [&](const DensityState& st) {
    traj.records.push_back({st.tau, st.f});
    traj.series.rows.push_back(density_row(st.f, st.tau, st.dt));
  };
  try {
    record(s);
    auto next = schedule.begin();
    while (next != schedule.end()) {
      const double target = *next;
      Outcome out = step_counted(s, config, target - s.tau);
      traj.rejected += out.rejected;
      s = std::move(out.state);
      ++traj.steps;
      if (std::abs(s.tau - target) <= 1e-13 * std::max(1.0, target)) s.tau = target;
      if (s.tau == target) {
        record(s);
        ++next;
      }
    }
  } catch (Error& e) {
    if (!e.time()) e.set_time(s.tau);
    throw;
  }
  return traj;
}

}  // namespace maflow
