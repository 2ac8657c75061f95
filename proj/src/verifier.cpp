#include "maflow/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "maflow/elliptic.hpp"
#include "maflow/functionals.hpp"
#include "maflow/geometry.hpp"

namespace maflow {

std::string to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Pass: return "pass";
    case VerdictStatus::Fail: return "fail";
    case VerdictStatus::Skipped: return "skipped";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

VerdictReport make(const std::string& name, const std::string& anchor, double tol, const std::string& gate = "") {
  VerdictReport r;
  r.name = name;
  r.anchor = anchor;
  r.tolerance = tol;
  r.gated_on = gate;
  r.slack = kInf;
  return r;
}

VerdictReport skipped(VerdictReport r, const std::string& why) {
  r.status = VerdictStatus::Skipped;
  r.slack = 0.0;
  r.note = why;
  return r;
}

// Lowers the running slack and remembers where.
void observe(VerdictReport& r, double slack, double t, std::size_t index) {
  if (slack < r.slack || std::isnan(slack)) {
    r.slack = slack;
    r.t = t;
    r.index = index;
  }
}

VerdictReport finish(VerdictReport r) {
  if (r.status == VerdictStatus::Skipped) return r;
  if (r.slack == kInf) r.slack = 0.0;
  r.status = (r.advisory || r.slack >= -r.tolerance) ? VerdictStatus::Pass : VerdictStatus::Fail;
  if (std::isnan(r.slack)) r.status = r.advisory ? VerdictStatus::Pass : VerdictStatus::Fail;
  return r;
}

const Field& stored_phi(const TrajectoryRecord& r) {
  if (r.phi.empty()) throw InvalidSpec("record at t = " + std::to_string(r.t) + " has no stored field");
  return r.phi;
}

Field phi_dot_of(const TrajectoryRecord& r, const FlowConfig& config) {
  if (!r.phi_dot.empty()) return r.phi_dot;
  return rhs(r.t, stored_phi(r), config);
}

double sup_h(const FlowConfig& c) { return c.h.empty() ? 0.0 : c.h.max(); }
double inf_h(const FlowConfig& c) { return c.h.empty() ? 0.0 : c.h.min(); }

bool bounded_kind(PotentialKind k) {
  PotentialSpec s;
  s.kind = k;
  return s.bounded();
}

std::string sign_gate(const TwistSpec& twist) { return "twist sign " + to_string(twist.sign_class()); }

bool same_times(const Trajectory& a, const Trajectory& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t k = 0; k < a.records.size(); ++k)
    if (std::abs(a.records[k].t - b.records[k].t) > 1e-12 * std::max(1.0, std::abs(a.records[k].t))) return false;
  return true;
}

}  // namespace

bool all_passed(const std::vector<VerdictReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const VerdictReport& r) { return r.advisory || r.status != VerdictStatus::Fail; });
}

VerdictReport verify_comparison(const RunData& low, const RunData& high, double tol) {
  VerdictReport r = make("comparison", "phi_0 <= psi_0  =>  phi_t <= psi_t", tol);
  if (!same_times(low.traj, high.traj)) throw ConfigMismatch("runs do not share record times");
  if (low.config.variant != high.config.variant || low.config.twist.c != high.config.twist.c)
    throw ConfigMismatch("runs use different flow configurations");
  for (std::size_t k = 0; k < low.traj.records.size(); ++k) {
    const Field& a = stored_phi(low.traj.records[k]);
    const Field& b = stored_phi(high.traj.records[k]);
    if (a.grid != b.grid) throw ConfigMismatch("runs live on different grids");
    for (std::size_t i = 0; i < a.size(); ++i) observe(r, b[i] - a[i], low.traj.records[k].t, i);
  }
  return finish(r);
}

VerdictReport verify_sup_bound(const RunData& run, double tol) {
  VerdictReport r = make("sup_bound", "sup phi_t <= sup phi_0 + (n log 2 - inf h) t", tol, "variant cmaf");
  if (run.config.variant != Variant::CMAF) return skipped(r, "normalized flow");
  const auto& rows = run.traj.series.rows;
  if (rows.empty()) return finish(r);
  const int n = run.traj.records.empty() ? 1 : stored_phi(run.traj.records.front()).grid.n;
  const double rate = n * std::log(2.0) - inf_h(run.config);
  const double sup0 = rows.front().sup;
  const double t0 = rows.front().t;
  for (const auto& row : rows) observe(r, sup0 + rate * (row.t - t0) - row.sup, row.t, 0);
  return finish(r);
}

double minoinf_constant(int n, double sup_h_value) { return sup_h_value + n * (std::log(4.0 * n) - 1.0); }

VerdictReport verify_minoinf(const RunData& run, double tol) {
  VerdictReport r = make("minoinf", "(1 - sqrt t)(phi_0 - inf phi_0 + 1) - C t + inf phi_0 - 1 <= phi_t", tol,
                         "bounded data");
  if (run.config.variant != Variant::CMAF) return skipped(r, "normalized flow");
  if (!bounded_kind(run.data)) return skipped(r, "unbounded initial data (" + to_string(run.data) + ")");
  if (run.traj.records.empty()) return finish(r);
  const Field& phi0 = stored_phi(run.traj.records.front());
  const double t0 = run.traj.records.front().t;
  const double C = minoinf_constant(phi0.grid.n, sup_h(run.config)) + 1e-12;
  const double inf0 = phi0.min();
  for (const auto& rec : run.traj.records) {
    const double t = rec.t - t0;
    if (t > 1.0) break;
    const Field& phi = stored_phi(rec);
    const double s = std::sqrt(t);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const double lower = (1.0 - s) * (phi0[i] - inf0 + 1.0) - C * t + inf0 - 1.0;
      observe(r, phi[i] - lower, rec.t, i);
    }
  }
  std::ostringstream note;
  note << "C = " << C;
  r.note = note.str();
  return finish(r);
}

VerdictReport verify_clef(const RunData& run, double tol) {
  VerdictReport r = make("clef", "H = t phi_dot - (phi_t - phi_0) - n t <= 0", tol, "variant cmaf");
  if (run.config.variant != Variant::CMAF) return skipped(r, "normalized flow");
  if (run.traj.records.empty()) return finish(r);
  const Field& phi0 = stored_phi(run.traj.records.front());
  const double t0 = run.traj.records.front().t;
  const int n = phi0.grid.n;
  for (const auto& rec : run.traj.records) {
    const double t = rec.t - t0;
    const Field& phi = stored_phi(rec);
    const Field dot = phi_dot_of(rec, run.config);
    for (std::size_t i = 0; i < phi.size(); ++i) observe(r, -(t * dot[i] - (phi[i] - phi0[i]) - n * t), rec.t, i);
  }
  return finish(r);
}

double stbelow_default_a(const FlowConfig& config) {
  const double tm = t_max(config.twist);
  return std::isinf(tm) ? 1.0 : 2.0 / (tm - config.T);
}

namespace {

// min over records with t > t0 of phi_dot - n log(t - t0) + A Osc(phi_t0).
VerdictReport stbelow_scan(const RunData& run, double A, double C, double tol) {
  VerdictReport r = make("stbelow", "phi_dot_t >= n log t - A Osc(phi_0) - C", tol, "bounded data");
  if (run.config.variant != Variant::CMAF) return skipped(r, "normalized flow");
  if (!bounded_kind(run.data)) return skipped(r, "unbounded initial data (" + to_string(run.data) + ")");
  const double tm = t_max(run.config.twist);
  if (!std::isinf(tm) && !(A > 1.0 / (tm - run.config.T))) throw InvalidSpec("need A > 1 / (T_max - T)");
  if (run.traj.records.empty()) return finish(r);
  const Field& phi0 = stored_phi(run.traj.records.front());
  const double t0 = run.traj.records.front().t;
  const int n = phi0.grid.n;
  const double osc = oscillation(phi0);
  for (const auto& rec : run.traj.records) {
    const double t = rec.t - t0;
    if (!(t > 0.0)) continue;
    const Field dot = phi_dot_of(rec, run.config);
    for (std::size_t i = 0; i < dot.size(); ++i) observe(r, dot[i] - n * std::log(t) + A * osc + C, rec.t, i);
  }
  std::ostringstream note;
  note << "A = " << A << ", C = " << C;
  r.note = note.str();
  return r;
}

}  // namespace

VerdictReport verify_stbelow(const RunData& run, double A, double C, double tol) {
  return finish(stbelow_scan(run, A, C, tol));
}

double calibrate_stbelow(const RunData& run, double A) {
  const VerdictReport r = stbelow_scan(run, A, 0.0, 0.0);
  if (r.status == VerdictStatus::Skipped || r.slack == kInf) return 0.0;
  return std::max(0.0, -r.slack);
}

RunData stbelow_reference_run() {
  const TorusGrid g = TorusGrid::make(1, 32);
  std::vector<Mode> modes = {{0.02, false, {1, 0, 0, 0}}, {0.01, true, {0, 1, 0, 0}}, {0.005, false, {1, 1, 0, 0}}};
  RunData ref;
  ref.data = PotentialKind::Smooth;
  ref.config.T = 1.0;
  ref.config.record_interval = 0.05;
  ref.config.h = modes_field({{0.2, false, {0, 1, 0, 0}}}, g);
  ref.config = ref.config.prepared(g);
  ref.traj = run(modes_field(modes, g), ref.config);
  return ref;
}

VerdictReport verify_density_monotone(const RunData& run, double tol) {
  VerdictReport r = make("density_monotone", "sup f_t and int f_t log(1 + f_t) dmu nonincreasing", tol,
                         sign_gate(run.config.twist));
  if (run.config.variant != Variant::CMAF) return skipped(r, "normalized flow");
  const SignClass sc = run.config.twist.sign_class();
  if (sc != SignClass::Zero && sc != SignClass::NonPos) return skipped(r, "needs twist <= 0");
  const auto& rows = run.traj.series.rows;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    observe(r, rows[k - 1].fmax - rows[k].fmax, rows[k].t, 0);
    observe(r, rows[k - 1].orlicz - rows[k].orlicz, rows[k].t, 0);
  }
  return finish(r);
}

VerdictReport verify_density_min(const RunData& run, double tol) {
  VerdictReport r = make("density_min", "inf f_t nondecreasing", tol, sign_gate(run.config.twist));
  if (run.config.variant != Variant::CMAF) return skipped(r, "normalized flow");
  const SignClass sc = run.config.twist.sign_class();
  if (sc != SignClass::Zero && sc != SignClass::NonNeg) return skipped(r, "needs twist >= 0");
  const auto& rows = run.traj.series.rows;
  for (std::size_t k = 1; k < rows.size(); ++k) observe(r, rows[k].fmin - rows[k - 1].fmin, rows[k].t, 0);
  return finish(r);
}

std::vector<VerdictReport> verify_lelong_attenuation(const LelongAttenuationInput& in, double tol) {
  VerdictReport sub = make("lelong_subsolution",
                           "(1 - 2 beta t) phi_0 + 2 beta t u + n (t log t - t) <= phi_t", 1e-6, "twist sign zero");
  VerdictReport nu = make("lelong_attenuation", "nu(phi_t) <= max(1 - 2 beta t, 0) gamma", tol * in.gamma,
                          "twist sign zero");
  if (in.seq == nullptr || in.runs == nullptr || in.runs->size() != in.seq->levels.size())
    throw InvalidSpec("lelong attenuation needs one run per approximation level");
  if (in.config.variant != Variant::CMAF || in.config.twist.sign_class() != SignClass::Zero) {
    const std::string why = "needs the unnormalized flow with zero twist";
    return {skipped(sub, why), skipped(nu, why)};
  }
  if (in.seq->spec.kind != PotentialKind::Lelong) {
    const std::string why = "needs Lelong data";
    return {skipped(sub, why), skipped(nu, why)};
  }
  const double alpha = 2.0 * in.beta;
  const FlowConfig& cfg = in.config;

  for (std::size_t j = 0; j < in.runs->size(); ++j) {
    const Field& phi0 = in.seq->levels[j].phi;
    const int n = phi0.grid.n;
    const Field u = solve_ma(alpha, -alpha * phi0, TwistSpec{}, 0.0, cfg.h).u;
    for (const auto& rec : (*in.runs)[j].records) {
      const double t = rec.t;
      if (t * alpha > 1.0) continue;
      const Field& phi = stored_phi(rec);
      const double tl = t > 0.0 ? t * std::log(t) - t : 0.0;
      for (std::size_t i = 0; i < phi.size(); ++i) {
        const double lower = (1.0 - alpha * t) * phi0[i] + alpha * t * u[i] + n * tl;
        observe(sub, phi[i] - lower, t, i);
      }
    }
  }

  const Trajectory& finest = in.runs->back();
  const auto z0 = in.seq->spec.singular_point(in.seq->grid);
  std::ostringstream note;
  for (double t : in.times) {
    const TrajectoryRecord* rec = finest.at(t);
    if (rec == nullptr) throw InvalidSpec("finest level has no record at t = " + std::to_string(t));
    const double est = lelong_estimate(stored_phi(*rec), z0);
    observe(nu, std::max(1.0 - alpha * t, 0.0) * in.gamma - est, t, 0);
    note << "nu(" << t << ") = " << est << "; ";
  }
  double fmax = 0.0, fl2 = 0.0;
  for (const auto& tr : *in.runs)
    for (const auto& row : tr.series.rows)
      if (row.t * alpha > 1.0) {
        fmax = std::max(fmax, row.fmax);
        fl2 = std::max(fl2, row.f_l2);
      }
  note << "after 1/(2 beta): max f = " << fmax << ", max ||f||_2 = " << fl2;
  nu.note = note.str();
  if (!std::isfinite(fmax) || !std::isfinite(fl2)) nu.slack = -kInf;
  return {finish(sub), finish(nu)};
}

VerdictReport verify_ncmaf_bound(const RunData& run, double tol) {
  VerdictReport r = make("ncmaf_bound", "H = (1 - e^-t) phi_dot - (phi_t - phi_0) - n t <= 0", tol, "variant ncmaf");
  if (run.config.variant != Variant::NCMAF) return skipped(r, "unnormalized flow");
  if (run.traj.records.empty()) return finish(r);
  const Field& phi0 = stored_phi(run.traj.records.front());
  const double t0 = run.traj.records.front().t;
  if (t0 != 0.0) return skipped(r, "run does not start at t = 0");
  const int n = phi0.grid.n;
  for (const auto& rec : run.traj.records) {
    const double t = rec.t;
    const Field& phi = stored_phi(rec);
    const Field dot = phi_dot_of(rec, run.config);
    const double w = -std::expm1(-t);
    for (std::size_t i = 0; i < phi.size(); ++i) observe(r, -(w * dot[i] - (phi[i] - phi0[i]) - n * t), t, i);
  }
  return finish(r);
}

std::vector<VerdictReport> verify_minodot(const RunData& direct, const RunData& restarted, double A, double C) {
  VerdictReport same = make("semigroup", "restart from phi_s reproduces phi_{t}", tolerance::semigroup);
  if (restarted.traj.records.empty()) throw InvalidSpec("restarted run has no records");
  for (const auto& rec : restarted.traj.records) {
    const TrajectoryRecord* d = direct.traj.at(rec.t);
    if (d == nullptr) continue;
    const Field& a = stored_phi(*d);
    const Field& b = stored_phi(rec);
    for (std::size_t i = 0; i < a.size(); ++i) observe(same, -std::abs(a[i] - b[i]), rec.t, i);
  }
  VerdictReport below = verify_stbelow(restarted, A, C);
  below.name = "minodot";
  below.anchor = "phi_dot_{s+t} >= n log t - A Osc(phi_s) - C";
  return {finish(same), below};
}

VerdictReport verify_c2_diagnostic(const RunData& run) {
  VerdictReport r = make("c2_diagnostic", "t log tr(M_t) <= 2 A Osc(phi_{t/2}) + C'", 0.0);
  r.advisory = true;
  const auto& recs = run.traj.records;
  double worst = 0.0;
  double at = 0.0;
  for (const auto& rec : recs) {
    if (!(rec.t > 0.0)) continue;
    const Field& phi = stored_phi(rec);
    const MetricField m = metric_matrix(phi, run.config.twist, rec.t);
    double tr = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) tr = std::max(tr, m.at(i).trace(phi.grid.n));
    const TrajectoryRecord* half = &recs.front();
    for (const auto& q : recs)
      if (q.t <= 0.5 * rec.t + 1e-12) half = &q;
    const double ratio = rec.t * std::log(tr) / (oscillation(stored_phi(*half)) + 1.0);
    if (ratio > worst) {
      worst = ratio;
      at = rec.t;
    }
  }
  r.slack = -worst;
  r.t = at;
  std::ostringstream note;
  note << "max ratio " << worst;
  r.note = note.str();
  return finish(r);
}

VerdictReport verify_oscillation_spread(const std::vector<Trajectory>& runs, PotentialKind data, double tol) {
  VerdictReport r = make("oscillation_spread", "(max_j - min_j) Osc(phi_{t,j}) <= bound * max_j Osc(phi_{t,j})", 0.0,
                         "zero Lelong numbers");
  if (data == PotentialKind::Lelong) return skipped(r, "positive Lelong number");
  r.note = "bound " + std::to_string(tol);
  if (runs.empty()) return finish(r);
  // The bound is a statement for t > 0; at the initial time the levels of
  // unbounded data differ by construction.
  for (std::size_t k = 1; k < runs.front().records.size(); ++k) {
    const double t = runs.front().records[k].t;
    double lo = kInf, hi = -kInf;
    for (const auto& tr : runs) {
      const TrajectoryRecord* rec = tr.at(t);
      if (rec == nullptr) throw ConfigMismatch("levels do not share record times");
      const double o = oscillation(stored_phi(*rec));
      lo = std::min(lo, o);
      hi = std::max(hi, o);
    }
    if (hi > 0.0) observe(r, tol - (hi - lo) / hi, t, 0);
  }
  return finish(r);
}

std::vector<VerdictReport> verify_run(const RunData& run) {
  std::vector<VerdictReport> out;
  out.push_back(verify_sup_bound(run));
  out.push_back(verify_minoinf(run));
  out.push_back(verify_clef(run));
  out.push_back(verify_stbelow(run, stbelow_default_a(run.config)));
  out.push_back(verify_density_monotone(run));
  out.push_back(verify_density_min(run));
  out.push_back(verify_ncmaf_bound(run));
  out.push_back(verify_c2_diagnostic(run));
  return out;
}

}  // namespace maflow
