// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// below; scenario sizes are chosen so the whole suite runs in a few minutes
// on one core.
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "maflow/elliptic.hpp"
#include "maflow/flow.hpp"
#include "maflow/functionals.hpp"
#include "maflow/geometry.hpp"
#include "maflow/initial_data.hpp"
#include "maflow/log_diffusion.hpp"
#include "maflow/oracle.hpp"
#include "maflow/spectral.hpp"
#include "maflow/verifier.hpp"
#include "support.hpp"

using namespace maflow;

namespace {

namespace tol {
constexpr double clef = 1e-5;
constexpr double ncmaf = 1e-5;
constexpr double sup_bound = 1e-6;
constexpr double comparison = 1e-6;
constexpr double limit_ratio = 0.7;
constexpr double energy_slack = 1e-4;
constexpr double mean_slope = 1e-3;
constexpr double convexity = 1e-3;
constexpr double density = 1e-5;
constexpr double lelong = 0.05;
constexpr double l2_spread = 0.1;
constexpr double continuity = 0.05;
constexpr double heat_ratio_lo = 3.5, heat_ratio_hi = 4.5;
constexpr double drift_rate = 1e-7;
constexpr double density_form = 1e-4;
constexpr double rescaling = 1e-4;
constexpr double rk4_lo = 3.5, rk4_hi = 4.2;
constexpr double newton_lo = 1.8, newton_hi = 2.2;
constexpr double hessian = 1e-10;
constexpr double volume = 1e-6;
}  // namespace tol

// Every flow run of the suite, for the volume identity.
struct Tracked {
  std::string name;
  FunctionalSeries series;
  double c = 0.0;
  int n = 1;
  double V = 1.0;
};
std::vector<Tracked> g_runs;

void track(const std::string& name, const Trajectory& tr, const FlowConfig& cfg, const TorusGrid& g) {
  g_runs.push_back({name, tr.series, cfg.twist.c, g.n, g.volume()});
}

Trajectory tracked_run(const std::string& name, const Field& phi0, const FlowConfig& cfg) {
  Trajectory tr = run(phi0, cfg.prepared(phi0.grid));
  track(name, tr, cfg, phi0.grid);
  return tr;
}

struct Detail {
  std::ostringstream os;
  bool pass = true;
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      os << "  FAILED: " << what << "\n";
    }
  }
  void info(const std::string& s) { os << "  " << s << "\n"; }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::vector<Mode> modes_for(int n, std::vector<Mode> one, std::vector<Mode> two) { return n == 1 ? one : two; }

TorusGrid scenario_grid(int n) { return TorusGrid::make(n, n == 1 ? 64 : 16, 2.0); }

Field h_for(const TorusGrid& g) {
  return modes_field(modes_for(g.n, {{0.1, false, {0, 1, 0, 0}}}, {{0.1, false, {0, 1, 1, 0}}}), g);
}

// ---------------------------------------------------------------------------
// Shared scenarios: n in {1, 2} x {smooth, bounded discontinuous, Lelong level}

struct Scenario {
  std::string name;
  PotentialKind kind;
  TorusGrid grid;
  Field phi0;
  FlowConfig cmaf;
  FlowConfig ncmaf;
  Trajectory cmaf_run;
  Trajectory ncmaf_run;
};

std::vector<Scenario> g_scenarios;

void build_scenarios() {
  for (int n : {1, 2}) {
    const TorusGrid g = scenario_grid(n);
    const auto smooth_modes = modes_for(n, {{0.05, false, {1, 0, 0, 0}}, {0.03, true, {0, 1, 0, 0}}},
                                        {{0.05, false, {1, 0, 0, 1}}, {0.03, true, {0, 1, 1, 0}}});
    const std::vector<std::pair<std::string, PotentialSpec>> specs = {
        {"smooth", PotentialSpec::smooth(smooth_modes)},
        {"bounded_discontinuous", PotentialSpec::bounded_discontinuous(1.0, 2.0, smooth_modes)},
        {"lelong", PotentialSpec::lelong(1.0)}};
    for (const auto& [name, spec] : specs) {
      Scenario s;
      s.name = "n=" + std::to_string(n) + " " + name;
      s.kind = spec.kind;
      s.grid = g;
      s.phi0 = spec.kind == PotentialKind::Smooth ? sample_potential(spec, g)
                                                  : approximation_sequence(spec, g, 3).levels.back().phi;
      FlowConfig c;
      c.T = 0.5;
      c.record_interval = 0.05;
      c.h = h_for(g);
      s.cmaf = c.prepared(g);
      c.variant = Variant::NCMAF;
      s.ncmaf = c.prepared(g);
      s.cmaf_run = tracked_run(s.name + " cmaf", s.phi0, s.cmaf);
      s.ncmaf_run = tracked_run(s.name + " ncmaf", s.phi0, s.ncmaf);
      g_scenarios.push_back(std::move(s));
    }
  }
}

RunData as_run(const Trajectory& tr, const FlowConfig& cfg, PotentialKind kind) { return {tr, cfg, kind}; }

// ---------------------------------------------------------------------------

bool criterion_maximum_principles(Detail& d) {
  for (const auto& s : g_scenarios) {
    const auto clef = verify_clef(as_run(s.cmaf_run, s.cmaf, s.kind), tol::clef);
    const auto sup = verify_sup_bound(as_run(s.cmaf_run, s.cmaf, s.kind), tol::sup_bound);
    const auto nb = verify_ncmaf_bound(as_run(s.ncmaf_run, s.ncmaf, s.kind), tol::ncmaf);
    d.info(s.name + fmt(": clef slack %.3g", clef.slack) + fmt(", ncmaf_bound %.3g", nb.slack) +
           fmt(", sup_bound %.3g", sup.slack));
    d.check(clef.status == VerdictStatus::Pass, s.name + " clef");
    d.check(sup.status == VerdictStatus::Pass, s.name + " sup_bound");
    d.check(nb.status == VerdictStatus::Pass, s.name + " ncmaf_bound");
  }
  return d.pass;
}

bool criterion_comparison(Detail& d) {
  const TorusGrid g = scenario_grid(1);
  FlowConfig c;
  c.T = 0.25;
  c.record_interval = 0.05;
  c.h = h_for(g);
  c = c.prepared(g);
  const std::vector<std::pair<std::string, PotentialSpec>> nested = {
      {"bounded_discontinuous", PotentialSpec::bounded_discontinuous(1.0, 2.0)},
      {"lelong", PotentialSpec::lelong(1.0)},
      {"zero_lelong", PotentialSpec::zero_lelong(0.5)}};
  for (const auto& [name, spec] : nested) {
    const auto seq = approximation_sequence(spec, g, 3);
    const auto runs = run_levels(seq, c);
    for (std::size_t k = 0; k < runs.size(); ++k) track(name + " level", runs[k], c, g);
    for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
      const auto v = verify_comparison(as_run(runs[k + 1], c, spec.kind), as_run(runs[k], c, spec.kind),
                                       tol::comparison);
      d.info(name + " levels " + std::to_string(k + 1) + "," + std::to_string(k + 2) + fmt(": slack %.3g", v.slack));
      d.check(v.status == VerdictStatus::Pass, name + " comparison");
    }
  }

  const std::vector<std::pair<std::string, PotentialSpec>> limits = {
      {"smooth", PotentialSpec::smooth({{0.05, false, {1, 0, 0, 0}}, {0.03, true, {0, 1, 0, 0}}})},
      {"zero_lelong", PotentialSpec::zero_lelong(0.5)}};
  for (const auto& [name, spec] : limits) {
    const auto seq = approximation_sequence(spec, g, 4);
    const auto runs = run_levels(seq, c);
    for (const auto& tr : runs) track(name + " limit level", tr, c, g);
    const LimitReport rep = limit_potential(runs, c.T, tol::limit_ratio);
    std::string ratios;
    double worst = 0.0;
    for (double r : rep.ratios) {
      ratios += fmt(" %.3f", r);
      worst = std::max(worst, r);
    }
    d.info(name + " decrement ratios at t = 0.25:" + ratios);
    d.check(!rep.ratios.empty() && worst <= tol::limit_ratio, name + " limit ratios");
  }
  return d.pass;
}

bool criterion_energy(Detail& d) {
  auto check_series = [&](const std::string& name, const FunctionalSeries& s, int n, double c, bool twist_zero,
                          bool convex) {
    const auto t = s.column("t"), E = s.column("E"), I = s.column("I");
    double e_slack = 1e300, slope_slack = 1e300, convex_slack = 1e300;
    for (std::size_t k = 1; k < t.size(); ++k) {
      e_slack = std::min(e_slack, E[k] - E[k - 1]);
      const double dt = t[k] - t[k - 1];
      const double bound = n * std::log(1.0 + std::max(t[k] * c, t[k - 1] * c));
      slope_slack = std::min(slope_slack, bound - (I[k] - I[k - 1]) / dt);
      if (k + 1 < t.size()) {
        const double h = t[k + 1] - t[k];
        convex_slack = std::min(convex_slack, (I[k + 1] - 2.0 * I[k] + I[k - 1]) / (h * dt));
      }
    }
    std::string line = name + fmt(": I slope slack %.3g", slope_slack);
    d.check(slope_slack >= -tol::mean_slope, name + " I slope");
    if (twist_zero) {
      line += fmt(", min E increment %.3g", e_slack);
      d.check(e_slack >= -tol::energy_slack, name + " E nondecreasing");
    }
    if (convex) {
      line += fmt(", min I'' %.3g", convex_slack);
      d.check(convex_slack >= -tol::convexity, name + " I convex");
    }
    d.info(line);
  };
  for (const auto& s : g_scenarios) check_series(s.name, s.cmaf_run.series, s.grid.n, 0.0, true, true);

  for (int n : {1, 2}) {
    const TorusGrid g = scenario_grid(n);
    const auto phi0 = modes_field(modes_for(n, {{0.05, false, {1, 0, 0, 0}}}, {{0.05, false, {1, 0, 0, 1}}}), g);
    for (double c : {0.5, -0.5}) {
      FlowConfig cfg;
      cfg.T = 0.5;
      cfg.record_interval = 0.05;
      cfg.h = h_for(g);
      cfg.twist.c = c;
      const auto tr = tracked_run("twist", phi0, cfg);
      check_series("n=" + std::to_string(n) + fmt(" c=%.1f", c), tr.series, n, c, false, c > 0.0);
    }
  }
  return d.pass;
}

bool criterion_density(Detail& d) {
  for (const auto& s : g_scenarios) {
    const RunData r = as_run(s.cmaf_run, s.cmaf, s.kind);
    const auto mono = verify_density_monotone(r, tol::density);
    const auto low = verify_density_min(r, tol::density);
    d.info(s.name + fmt(": sup f / Orlicz slack %.3g, inf f slack %.3g", mono.slack, low.slack));
    d.check(mono.status == VerdictStatus::Pass, s.name + " density monotone");
    d.check(low.status == VerdictStatus::Pass, s.name + " density min");
  }
  return d.pass;
}

bool criterion_lelong(Detail& d) {
  const double beta = 0.9, gamma = 1.0;
  const TorusGrid g = TorusGrid::make(1, 128, 2.0);
  const PotentialSpec spec = PotentialSpec::lelong(gamma);
  const auto seq = approximation_sequence(spec, g, 3);
  FlowConfig c;
  c.T = 0.6;
  c.record_interval = 0.05;
  c.record_times = {0.1, 0.25, 0.4, 0.6};
  c = c.prepared(g);
  const auto runs = run_levels(seq, c);
  for (const auto& tr : runs) track("lelong level", tr, c, g);

  LelongAttenuationInput in;
  in.seq = &seq;
  in.runs = &runs;
  in.config = c;
  in.gamma = gamma;
  in.beta = beta;
  in.times = c.record_times;
  for (const auto& v : verify_lelong_attenuation(in, tol::lelong)) {
    d.info(v.name + fmt(": slack %.3g", v.slack));
    d.check(v.status == VerdictStatus::Pass, v.name);
  }

  const auto z0 = spec.singular_point(g);
  for (double t : c.record_times) {
    const double nu = lelong_estimate(runs.back().at(t)->phi, z0);
    const double bound = t < 1.0 / (2.0 * beta) ? (1.0 - 2.0 * beta * t) * gamma + tol::lelong : tol::lelong;
    d.info(fmt("nu(phi_%.2f) = %.4f", t, nu) + fmt(" <= %.4f", bound));
    d.check(nu <= bound, fmt("Lelong number at t = %.2f", t));
  }

  double lo = 1e300, hi = 0.0, fmax = 0.0;
  for (std::size_t j = 0; j < runs.size(); ++j) {
    const Field f = density(runs[j].at(0.6)->phi, c.twist, 0.6, c.h);
    const double l2 = lp_norm(f, 2.0, c.h);
    d.check(f.all_finite(), "density finite on level " + std::to_string(j + 1));
    d.info("level " + std::to_string(j + 1) + fmt(": max f_0.6 = %.4f, ||f_0.6||_2 = %.4f", f.max(), l2));
    lo = std::min(lo, l2);
    hi = std::max(hi, l2);
    fmax = std::max(fmax, f.max());
  }
  d.check(std::isfinite(fmax), "max f finite");
  d.check((hi - lo) / hi <= tol::l2_spread, fmt("L2 norm spread %.3f across levels", (hi - lo) / hi));
  return d.pass;
}

bool criterion_continuity(Detail& d) {
  const double t = 0.01;
  for (int n : {1, 2}) {
    const TorusGrid g = scenario_grid(n);
    FlowConfig c;
    c.T = t;
    c = c.prepared(g);
    // a < n/(n+1) for finite energy.
    const std::vector<std::pair<std::string, PotentialSpec>> specs = {
        {"zero_lelong", PotentialSpec::zero_lelong(0.5)},
        {"finite_energy", PotentialSpec::finite_energy(0.4 * n / (n + 1.0))}};
    for (const auto& [name, spec] : specs) {
      const auto seq = approximation_sequence(spec, g, 3);
      const auto runs = run_levels(seq, c);
      for (std::size_t j = 0; j < runs.size(); ++j) {
        track(name + " continuity", runs[j], c, g);
        const Field& p0 = runs[j].records.front().phi;
        const Field& pt = runs[j].records.back().phi;
        Field diff = pt - p0, a0 = p0;
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::abs(diff[i]), a0[i] = std::abs(a0[i]);
        const double rel = integrate(diff) / integrate(a0);
        std::string line = "n=" + std::to_string(n) + " " + name + " level " + std::to_string(j + 1) +
                           fmt(": L1 change %.4f of ||phi_0||_1", rel);
        d.check(rel <= tol::continuity, line);
        if (spec.kind == PotentialKind::FiniteEnergy) {
          const double e0 = runs[j].series.rows.front().E, et = runs[j].series.rows.back().E;
          const double erel = std::abs(et - e0) / std::abs(e0);
          line += fmt(", energy change %.4f of |E_0|", erel);
          d.check(erel <= tol::continuity, line);
        }
        d.info(line);
      }
    }
  }
  return d.pass;
}

bool criterion_oracles(Detail& d) {
  // Heat limit.
  for (int n : {1, 2}) {
    const TorusGrid g = TorusGrid::make(n, n == 1 ? 32 : 8);
    const auto m = modes_for(n, {{1.0, false, {1, 0, 0, 0}}}, {{1.0, false, {1, 0, 0, 1}}});
    const auto rows = heat_limit_study(m, g, 4e-3, 3, 0.05, FlowConfig{});
    for (std::size_t k = 1; k < rows.size(); ++k) {
      d.info("heat n=" + std::to_string(n) + fmt(": eps %.0e", rows[k].eps) + fmt(" error ratio %.3f", rows[k].ratio));
      d.check(rows[k].ratio >= tol::heat_ratio_lo && rows[k].ratio <= tol::heat_ratio_hi, "heat error ratio");
    }
  }

  // Fixed points of the flow: det(I + H u) = e^h.
  for (int n : {1, 2}) {
    const TorusGrid g = n == 1 ? TorusGrid::make(1, 64) : TorusGrid::make(2, 16, 2.0);
    const Field h = normalize_density_exponent(testsupport::random_band_limited(g, 2, 0.1, 500 + n));
    EllipticOptions opt;
    opt.tol = 1e-12;
    const Field u = solve_ma(0.0, Field(g), TwistSpec{}, 0.0, h, opt).u;
    FlowConfig c;
    c.T = n == 1 ? 1.0 : 0.5;
    c.h = h;
    const auto tr = tracked_run("fixed point", u, c);
    const double rate = sup_distance(tr.records.back().phi, u) / c.T;
    d.info("fixed point n=" + std::to_string(n) + fmt(": drift %.3g per unit time", rate));
    d.check(rate <= tol::drift_rate, "fixed point drift");
  }

  // Potential form against density form on [0, 1].
  {
    const TorusGrid g = TorusGrid::make(1, 64);
    const Field phi0 = testsupport::random_band_limited(g, 3, 0.03, 830);
    FlowConfig fc;
    fc.T = 1.0;
    fc.record_interval = 0.1;
    const auto pot = tracked_run("density form", phi0, fc);
    LogDiffusionConfig dc;
    dc.T = kLogDiffusionTimeScale * fc.T;
    dc.record_interval = kLogDiffusionTimeScale * fc.record_interval;
    const auto den = run_logfd(potential_to_density(phi0), dc);
    double worst = 0.0;
    for (std::size_t k = 0; k < pot.records.size() && k < den.records.size(); ++k)
      worst = std::max(worst, sup_distance(potential_to_density(pot.records[k].phi), den.records[k].f));
    d.check(den.records.size() == pot.records.size(), "density form record count");
    d.info(fmt("potential vs density form: sup error %.3g", worst));
    d.check(worst <= tol::density_form, "density form");
  }

  // Normalized flow against the rescaled twisted flow.
  for (int n : {1, 2}) {
    const TorusGrid g = TorusGrid::make(n, n == 1 ? 32 : 8);
    const Field phi0 = testsupport::random_band_limited(g, 2, 0.01, 580 + n);
    const double t = 0.5, s = 1.0 - std::exp(-t);
    FlowConfig nc;
    nc.T = t;
    nc.variant = Variant::NCMAF;
    FlowConfig cc;
    cc.T = s;
    cc.twist.c = -1.0;
    const Field pn = tracked_run("ncmaf", phi0, nc).records.back().phi;
    const Field pc = tracked_run("rescaled", phi0, cc).records.back().phi;
    const Field mapped = std::exp(t) * pc + n * (std::exp(t) - 1.0 - t);
    const double rel = sup_distance(pn, mapped) / sup_norm(pn);
    d.info("rescaling n=" + std::to_string(n) + fmt(": relative error %.3g", rel));
    d.check(rel <= tol::rescaling, "rescaling identity");
  }
  return d.pass;
}

bool criterion_hygiene(Detail& d) {
  // RK4 order with fixed step sizes below the stability limit.
  {
    const TorusGrid g = TorusGrid::make(1, 8);
    const Field phi0 = testsupport::random_band_limited(g, 2, 0.05, 590);
    auto solve = [&](double dt) {
      FlowConfig c;
      c.T = 0.2;
      c.safety = 1.0;
      c.dt_init = dt;
      return tracked_run("rk4 order", phi0, c).records.back().phi;
    };
    const Field ref = solve(2.5e-5);
    const double e1 = sup_distance(solve(1.6e-3), ref), e2 = sup_distance(solve(8e-4), ref);
    const double order = std::log2(e1 / e2);
    d.info(fmt("RK4 errors %.3g, %.3g", e1, e2) + fmt(": order %.3f", order));
    d.check(order >= tol::rk4_lo && order <= tol::rk4_hi, "RK4 order");
  }

  // Newton linearization against finite differences.
  for (int n : {1, 2}) {
    const TorusGrid g = TorusGrid::make(n, n == 1 ? 64 : 16);
    const Field u = testsupport::random_band_limited(g, 2, 0.01, 81 + n);
    const Field dir = testsupport::random_band_limited(g, 3, 0.01, 91 + n);
    const Field gf = testsupport::random_band_limited(g, 2, 0.3, 95 + n);
    const TwistSpec tw{0.1, {}};
    const Linearization lin(u, 0.8, tw, 0.3);
    const Field jd = lin.apply(dir);
    const Field r0 = newton_residual(u, 0.8, gf, tw, 0.3, Field());
    std::vector<double> errs;
    for (double s : {1e-1, 5e-2, 2.5e-2}) {
      const Field rs = newton_residual(axpy(u, s, dir), 0.8, gf, tw, 0.3, Field());
      double err = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(rs[i] - r0[i] - s * jd[i]));
      errs.push_back(err);
    }
    for (std::size_t k = 1; k < errs.size(); ++k) {
      const double order = std::log2(errs[k - 1] / errs[k]);
      d.info("Newton n=" + std::to_string(n) + fmt(": finite-difference order %.3f", order));
      d.check(order >= tol::newton_lo && order <= tol::newton_hi, "Newton linearization order");
    }
  }

  // Spectral Hessian against symbolic differentiation.
  for (int n : {1, 2}) {
    const TorusGrid g = TorusGrid::make(n, n == 1 ? 64 : 16, 1.5);
    const auto terms = testsupport::random_terms(n, g.res / 4 - 1, 4242u + n, 8);
    const auto h = complex_hessian(testsupport::from_terms(terms, g));
    double scale = 0.0, err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Herm2 ref = testsupport::symbolic_hessian(terms, g, g.coords(i));
      const Herm2 got = h.at(i);
      scale = std::max({scale, std::abs(ref.a), std::abs(ref.d), std::sqrt(ref.abs_b2())});
      err = std::max({err, std::abs(got.a - ref.a), std::abs(got.d - ref.d), std::abs(got.b_re - ref.b_re),
                      std::abs(got.b_im - ref.b_im)});
    }
    d.info("Hessian n=" + std::to_string(n) + fmt(": relative error %.3g", err / scale));
    d.check(err / scale <= tol::hessian, "spectral Hessian");
  }

  // Volume identity on a run with a nonconstant twist potential.
  {
    const TorusGrid g = TorusGrid::make(2, 16, 2.0);
    FlowConfig c;
    c.T = 0.5;
    c.record_interval = 0.05;
    c.twist.c = -0.5;
    c.twist.psi_chi = modes_field({{0.02, false, {1, 0, 0, 1}}}, g);
    tracked_run("twisted volume", modes_field({{0.03, true, {0, 1, 1, 0}}}, g), c);
  }
  double worst = 0.0;
  std::size_t rows = 0;
  for (const auto& r : g_runs)
    for (const auto& row : r.series.rows) {
      const double expect = std::pow(1.0 + row.t * r.c, r.n) * r.V;
      worst = std::max(worst, std::abs(row.vol - expect) / expect);
      ++rows;
    }
  d.info("volume identity over " + std::to_string(g_runs.size()) + " runs, " + std::to_string(rows) +
         fmt(" records: worst relative error %.3g", worst));
  d.check(worst <= tol::volume, "volume identity");
  return d.pass;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  struct Criterion {
    const char* name;
    std::function<bool(Detail&)> fn;
  };
  const std::vector<Criterion> criteria = {
      {"maximum principles (clef, ncmaf_bound, sup_bound on 6 scenarios)", criterion_maximum_principles},
      {"comparison of nested levels and geometric limit decrements", criterion_comparison},
      {"energy monotone, mean value slope and convexity", criterion_energy},
      {"density sup, inf and Orlicz monotonicity", criterion_density},
      {"Lelong attenuation and integrable densities after 1/(2 beta)", criterion_lelong},
      {"continuity at zero for zero-Lelong and finite-energy data", criterion_continuity},
      {"oracle equivalences (heat, fixed point, density form, rescaling)", criterion_oracles},
      {"numerical hygiene (RK4 order, Newton, Hessian, volume)", criterion_hygiene},
  };

  const auto t0 = clock::now();
  std::printf("building shared scenarios...\n");
  std::fflush(stdout);
  build_scenarios();
  std::printf("  done in %.1f s\n", std::chrono::duration<double>(clock::now() - t0).count());

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = clock::now();
    Detail d;
    bool ok = false;
    try {
      ok = criteria[k].fn(d);
    } catch (const std::exception& e) {
      d.os << "  exception: " << e.what() << "\n";
      ok = false;
    }
    const double secs = std::chrono::duration<double>(clock::now() - start).count();
    std::printf("[%s] %zu. %s (%.1f s)\n%s", ok ? "PASS" : "FAIL", k + 1, criteria[k].name, secs, d.os.str().c_str());
    std::fflush(stdout);
    failed += ok ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed in %.1f s\n", criteria.size() - failed, criteria.size(),
              std::chrono::duration<double>(clock::now() - t0).count());
  return failed == 0 ? 0 : 1;
}
