#include "maflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <set>

#include "maflow/geometry.hpp"
#include "maflow/spectral.hpp"

namespace maflow {

std::string to_string(Variant v) { return v == Variant::CMAF ? "cmaf" : "ncmaf"; }
std::string to_string(StepPolicy p) { return p == StepPolicy::RK4 ? "rk4" : "semi_implicit"; }

Field normalize_density_exponent(const Field& h) {
  Field e(h.grid);
  for (std::size_t i = 0; i < h.size(); ++i) e[i] = std::exp(h[i]);
  return h + (-std::log(mean(e)));
}

FlowConfig FlowConfig::prepared(const TorusGrid& grid) const {
  FlowConfig c = *this;
  if (!h.empty() && h.grid != grid) throw InvalidSpec("density exponent lives on a different grid");
  if (twist.has_psi() && twist.psi_chi.grid != grid) throw InvalidSpec("twist potential lives on a different grid");
  if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidSpec("horizon T must be finite and >= 0");
  if (!(dt_min > 0.0)) throw InvalidSpec("dt_min must be positive");
  if (!(dt_init >= dt_min)) throw InvalidSpec("dt_init must be >= dt_min");
  if (!(safety > 0.0 && safety <= 1.0)) throw InvalidSpec("safety factor must lie in (0, 1]");
  if (!(guard_fraction >= 0.0 && guard_fraction < 1.0)) throw InvalidSpec("guard fraction must lie in [0, 1)");
  if (record_every < 0 || record_interval < 0.0) throw InvalidSpec("record cadence must be >= 0");
  if (variant == Variant::NCMAF && (twist.c != 0.0 || twist.has_psi()))
    throw InvalidSpec("the normalized flow is only supported with c = 0 and psi_chi = 0");
  if (variant == Variant::CMAF && !(T < t_max(twist)))
    throw InvalidSpec("horizon T = " + std::to_string(T) + " is not below T_max = " + std::to_string(t_max(twist)));
  if (std::abs(T * twist.c) > 0.5 + 1e-15)
    throw InvalidSpec("need |T c| <= 1/2 so that theta_t stays within [omega/2, 2 omega]");
  if (twist.has_psi()) {
    const HermitianField hp = complex_hessian(twist.psi_chi);
    double norm = 0.0;
    for (std::size_t i = 0; i < hp.size(); ++i) {
      const Herm2 m = hp.at(i);
      norm = std::max({norm, std::abs(m.min_eig(grid.n)), std::abs(m.max_eig(grid.n))});
    }
    if (T * norm > 0.5 + 1e-15) throw InvalidSpec("need ||T H(psi_chi)|| <= 1/2");
  }
  for (double t : record_times)
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidSpec("record times must be finite and >= 0");
  if (!h.empty()) {
    if (!h.all_finite()) throw InvalidSpec("density exponent must be finite");
    c.h = normalize_density_exponent(h);
  }
  return c;
}

namespace {

struct Evaluation {
  Field value;
  double min_eig = 0.0;
};

Evaluation evaluate(double t, const Field& phi, const FlowConfig& cfg) {
  const MetricField m = metric_matrix(phi, cfg.twist, t);
  const int n = phi.grid.n;
  Evaluation e{Field(phi.grid), m.min_eig()};
  for (std::size_t i = 0; i < phi.size(); ++i) e.value[i] = std::log(m.at(i).det(n));
  if (!cfg.h.empty()) e.value -= cfg.h;
  if (cfg.variant == Variant::NCMAF) e.value += phi;
  if (cfg.dealias) e.value = spectral_for(phi.grid).dealias(e.value);
  return e;
}

Field advance_rk4(const FlowState& s, const FlowConfig& cfg, double dt) {
  const Field& k1 = s.phi_dot;
  const Field k2 = evaluate(s.t + 0.5 * dt, axpy(s.phi, 0.5 * dt, k1), cfg).value;
  const Field k3 = evaluate(s.t + 0.5 * dt, axpy(s.phi, 0.5 * dt, k2), cfg).value;
  const Field k4 = evaluate(s.t + dt, axpy(s.phi, dt, k3), cfg).value;
  Field out = s.phi;
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// ARS(2,2,2): stiffly accurate IMEX Runge-Kutta. The implicit part is
// kappa * trH(u) with kappa = 1 / min_eig, the explicit part the remainder.
Field advance_imex(const FlowState& s, const FlowConfig& cfg, double dt) {
  const double gamma = 1.0 - 1.0 / std::sqrt(2.0);
  const double delta = 1.0 - 1.0 / (2.0 * gamma);
  const double kappa = 1.0 / s.min_eig;
  Spectral& sp = spectral_for(s.phi.grid);

  auto solve = [&](const Field& r) { return sp.solve_shifted((-1.0 / (gamma * dt)) * r, kappa, 1.0 / (gamma * dt)); };

  const Field n1 = axpy(s.phi_dot, -kappa, sp.flat_trace(s.phi));
  const Field u2 = solve(axpy(s.phi, gamma * dt, n1));
  const Field l2 = kappa * sp.flat_trace(u2);
  const Field n2 = evaluate(s.t + gamma * dt, u2, cfg).value - l2;
  Field r3 = s.phi;
  for (std::size_t i = 0; i < r3.size(); ++i)
    r3[i] += dt * (delta * n1[i] + (1.0 - delta) * n2[i] + (1.0 - gamma) * l2[i]);
  return solve(r3);
}

}  // namespace

Field rhs(double t, const Field& phi, const FlowConfig& config) { return evaluate(t, phi, config).value; }

FlowState make_state(double t, Field phi, const FlowConfig& config) {
  Evaluation e = evaluate(t, phi, config);
  FlowState s;
  s.t = t;
  s.phi = std::move(phi);
  s.phi_dot = std::move(e.value);
  s.min_eig = e.min_eig;
  return s;
}

double policy_dt(const FlowState& state, const FlowConfig& config) {
  if (config.policy == StepPolicy::SemiImplicit) return config.dt_init * std::min(1.0, state.min_eig);
  const TorusGrid& g = state.phi.grid;
  const double h = g.spacing();
  return std::min(config.dt_init, config.safety * h * h * state.min_eig / (4.0 * g.n));
}

namespace {

struct StepOutcome {
  FlowState state;
  int rejected = 0;
};

StepOutcome step_counted(const FlowState& state, const FlowConfig& config, double dt_cap) {
  double dt = std::min(policy_dt(state, config), dt_cap);
  const double guard = std::max(config.guard_abs, config.guard_fraction * state.min_eig);
  int rejected = 0;
  for (;;) {
    if (dt < config.dt_min && dt < dt_cap)
      throw StepSizeUnderflow("dt = " + std::to_string(dt) + " below dt_min = " + std::to_string(config.dt_min));
    try {
      Field next = config.policy == StepPolicy::RK4 ? advance_rk4(state, config, dt) : advance_imex(state, config, dt);
      if (next.all_finite()) {
        FlowState s = make_state(state.t + dt, std::move(next), config);
        if (s.phi_dot.all_finite() && s.min_eig >= guard) {
          s.step_count = state.step_count + 1;
          s.dt = dt;
          return {std::move(s), rejected};
        }
      }
    } catch (const KaehlerConeViolation&) {
    }
    ++rejected;
    dt *= 0.5;
  }
}

}  // namespace

FlowState step(const FlowState& state, const FlowConfig& config, double dt_cap) {
  return step_counted(state, config, dt_cap).state;
}

const TrajectoryRecord* Trajectory::at(double t) const {
  for (const auto& r : records)
    if (std::abs(r.t - t) <= 1e-12 * std::max(1.0, std::abs(t))) return &r;
  return nullptr;
}

Trajectory run(const Field& phi0, const FlowConfig& config_in, double t0) {
  const FlowConfig config = config_in.prepared(phi0.grid);
  if (!(t0 >= 0.0) || t0 > config.T) throw InvalidSpec("start time must lie in [0, T]");

  std::set<double> schedule;
  for (double t : config.record_times)
    if (t > t0 && t <= config.T) schedule.insert(t);
  if (config.record_interval > 0.0)
    for (long k = 1;; ++k) {
      const double t = static_cast<double>(k) * config.record_interval;
      if (t > config.T * (1.0 + 1e-14)) break;
      if (t > t0) schedule.insert(std::min(t, config.T));
    }
  if (config.T > t0) schedule.insert(config.T);

  Trajectory traj;
  FlowState state;
  auto record = [&](const FlowState& s) {
    TrajectoryRecord r;
    r.t = s.t;
    r.step = s.step_count;
    r.min_eig = s.min_eig;
    if (config.keep_fields) {
      r.phi = s.phi;
      r.phi_dot = s.phi_dot;
    }
    traj.records.push_back(std::move(r));
    FunctionalRow row = evaluate_functionals(s.phi, config.twist, s.t, config.h);
    row.dt = s.dt;
    traj.series.rows.push_back(row);
  };

  try {
    state = make_state(t0, phi0, config);
    record(state);
    auto next = schedule.begin();
    while (next != schedule.end()) {
      const double target = *next;
      StepOutcome out = step_counted(state, config, target - state.t);
      traj.rejected += out.rejected;
      state = std::move(out.state);
      ++traj.steps;
      const double tol = 1e-13 * std::max(1.0, std::abs(target));
      if (std::abs(state.t - target) <= tol) state.t = target;
      if (state.t == target) {
        record(state);
        ++next;
      } else if (config.record_every > 0 && traj.steps % config.record_every == 0) {
        record(state);
      }
    }
  } catch (Error& e) {
    if (!e.time()) e.set_time(state.t);
    throw;
  }
  return traj;
}

std::vector<Trajectory> run_levels(const ApproximationSequence& seq, const FlowConfig& config, int workers) {
  std::vector<Trajectory> out(seq.levels.size());
  workers = std::max(1, workers);
  for (std::size_t start = 0; start < seq.levels.size(); start += static_cast<std::size_t>(workers)) {
    const std::size_t stop = std::min(seq.levels.size(), start + static_cast<std::size_t>(workers));
    if (workers == 1) {
      out[start] = run(seq.levels[start].phi, config);
      continue;
    }
    std::vector<std::future<Trajectory>> jobs;
    for (std::size_t k = start; k < stop; ++k)
      jobs.push_back(std::async(std::launch::async, [&, k] { return run(seq.levels[k].phi, config); }));
    for (std::size_t k = start; k < stop; ++k) out[k] = jobs[k - start].get();
  }
  return out;
}

LimitReport limit_potential(const std::vector<Trajectory>& levels, double t, double ratio_bound) {
  if (levels.size() < 3) throw InvalidSpec("limit_potential needs at least 3 levels");
  std::vector<const Field*> phis;
  for (const auto& tr : levels) {
    const TrajectoryRecord* r = tr.at(t);
    if (r == nullptr || r->phi.empty()) throw InvalidSpec("level has no stored field at t = " + std::to_string(t));
    phis.push_back(&r->phi);
  }
  LimitReport rep;
  rep.phi = *phis.back();
  rep.max_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < phis.size(); ++j) {
    rep.decrements.push_back(sup_distance(*phis[j], *phis[j + 1]));
    for (std::size_t i = 0; i < rep.phi.size(); ++i)
      rep.max_increase = std::max(rep.max_increase, (*phis[j + 1])[i] - (*phis[j])[i]);
  }
  for (std::size_t k = 0; k + 1 < rep.decrements.size(); ++k)
    rep.ratios.push_back(rep.decrements[k] > 0.0 ? rep.decrements[k + 1] / rep.decrements[k] : 0.0);
  rep.converged = std::all_of(rep.ratios.begin(), rep.ratios.end(), [&](double r) { return r <= ratio_bound; });
  return rep;
}

}  // namespace maflow
