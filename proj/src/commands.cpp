#include "maflow/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace maflow {

namespace fs = std::filesystem;

namespace {

bool is_level_run(PotentialKind k) { return k != PotentialKind::Smooth && k != PotentialKind::FromFile; }

void write_failure(const fs::path& dir, const Error& e) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  nlohmann::json doc{{"error", e.what()}};
  doc["time"] = e.time() ? nlohmann::json(*e.time()) : nlohmann::json(nullptr);
  std::ofstream(dir / "failure.json") << doc.dump(2) << "\n";
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Selection {
  std::vector<std::string> names;
  std::map<std::string, double> tolerances;

  bool wants(const std::string& name) const {
    return std::find(names.begin(), names.end(), "all") != names.end() ||
           std::find(names.begin(), names.end(), name) != names.end();
  }
  double tol(const std::string& name, double fallback) const {
    auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
  }
};

double stbelow_a(const StoredRun& s) {
  return s.config.stbelow_a > 0.0 ? s.config.stbelow_a : stbelow_default_a(s.data.config);
}

void single_run_checks(const StoredRun& s, const Selection& sel, const std::string& label,
                       std::vector<VerdictReport>& out) {
  const RunData& d = s.data;
  std::vector<VerdictReport> reps;
  if (sel.wants("sup_bound")) reps.push_back(verify_sup_bound(d, sel.tol("sup_bound", tolerance::sup_bound)));
  if (sel.wants("minoinf")) reps.push_back(verify_minoinf(d, sel.tol("minoinf", tolerance::minoinf)));
  if (sel.wants("clef")) reps.push_back(verify_clef(d, sel.tol("clef", tolerance::clef)));
  if (sel.wants("stbelow"))
    reps.push_back(verify_stbelow(d, stbelow_a(s), kStbelowC, sel.tol("stbelow", tolerance::stbelow)));
  if (sel.wants("density_monotone"))
    reps.push_back(verify_density_monotone(d, sel.tol("density_monotone", tolerance::density)));
  if (sel.wants("density_min")) reps.push_back(verify_density_min(d, sel.tol("density_min", tolerance::density)));
  if (sel.wants("ncmaf_bound")) reps.push_back(verify_ncmaf_bound(d, sel.tol("ncmaf_bound", tolerance::ncmaf)));
  if (sel.wants("c2_diagnostic")) reps.push_back(verify_c2_diagnostic(d));
  for (auto& r : reps) {
    if (!label.empty()) r.note = r.note.empty() ? label : label + "; " + r.note;
    out.push_back(std::move(r));
  }
}

}  // namespace

std::vector<fs::path> level_directories(const fs::path& dir) {
  std::vector<std::pair<int, fs::path>> found;
  if (fs::is_directory(dir))
    for (const auto& e : fs::directory_iterator(dir)) {
      const std::string name = e.path().filename().string();
      if (e.is_directory() && name.rfind("level_", 0) == 0) {
        try {
          found.emplace_back(std::stoi(name.substr(6)), e.path());
        } catch (const std::exception&) {
        }
      }
    }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  for (auto& [j, p] : found) out.push_back(p);
  return out;
}

RunSummary execute_run(const RunConfig& config, const fs::path& dir) {
  RunSummary sum;
  sum.directory = dir;
  const FlowConfig flow = config.flow_config().prepared(config.grid);
  try {
    if (!is_level_run(config.initial.kind)) {
      const Trajectory tr = run(sample_potential(config.initial, config.grid), flow);
      write_trajectory(dir, tr, config, flow, config.initial.kind);
      sum.trajectories.push_back(dir);
      sum.steps = tr.steps;
      return sum;
    }
    const auto seq = approximation_sequence(config.initial, config.grid, config.levels, config.truncation);
    if (!config.run_all_levels) {
      const Trajectory tr = run(seq.levels.back().phi, flow);
      write_trajectory(dir, tr, config, flow, config.initial.kind, {{"level", std::to_string(seq.levels.back().j)}});
      sum.trajectories.push_back(dir);
      sum.steps = tr.steps;
      return sum;
    }
    const auto runs = run_levels(seq, flow, config.workers);
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const int j = seq.levels[k].j;
      const fs::path sub = dir / ("level_" + std::to_string(j));
      write_trajectory(sub, runs[k], config, flow, config.initial.kind, {{"level", std::to_string(j)}});
      sum.trajectories.push_back(sub);
      sum.steps += runs[k].steps;
    }
    return sum;
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    write_failure(dir, e);
    throw;
  }
}

RunSummary execute_restart(const fs::path& source, double from, const fs::path& dir, std::optional<double> horizon) {
  StoredRun src = read_trajectory(source);
  const TrajectoryRecord* rec = src.data.traj.at(from);
  if (rec == nullptr || rec->phi.empty()) throw ConfigError("no stored record at t = " + g17(from) + " in " + source.string());
  RunConfig cfg = src.config;
  if (horizon) cfg.T = *horizon;
  if (!(cfg.T >= from)) throw ConfigError("restart horizon lies before the restart time");
  FlowConfig flow = src.data.config;
  flow.T = cfg.T;
  RunSummary sum;
  sum.directory = dir;
  try {
    const Trajectory tr = run(rec->phi, flow, rec->t);
    std::map<std::string, std::string> meta{{"restart_of", fs::absolute(source).string()},
                                            {"restart_time", g17(rec->t)}};
    if (auto it = src.meta.find("level"); it != src.meta.end()) meta["level"] = it->second;
    write_trajectory(dir, tr, cfg, flow, src.data.data, meta);
    sum.trajectories.push_back(dir);
    sum.steps = tr.steps;
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    write_failure(dir, e);
    throw;
  }
  return sum;
}

std::vector<VerdictReport> verify_directory(const fs::path& dir, const std::vector<std::string>& checks) {
  for (const auto& name : checks)
    if (name != "all" && std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end())
      throw ConfigError("unknown check '" + name + "'");

  std::vector<VerdictReport> out;
  const auto levels = level_directories(dir);
  if (levels.empty()) {
    const StoredRun s = read_trajectory(dir);
    const Selection sel{checks.empty() ? s.config.checks : checks, s.config.tolerances};
    single_run_checks(s, sel, "", out);
    if (sel.wants("minodot")) {
      auto it = s.meta.find("restart_of");
      if (it != s.meta.end()) {
        const StoredRun direct = read_trajectory(it->second);
        for (auto& r : verify_minodot(direct.data, s.data, stbelow_a(direct))) out.push_back(std::move(r));
      }
    }
    return out;
  }

  std::vector<StoredRun> runs;
  for (const auto& p : levels) runs.push_back(read_trajectory(p));
  const RunConfig& cfg = runs.front().config;
  const Selection sel{checks.empty() ? cfg.checks : checks, cfg.tolerances};
  for (const auto& s : runs) {
    const auto it = s.meta.find("level");
    single_run_checks(s, sel, "level " + (it == s.meta.end() ? std::string("?") : it->second), out);
  }
  // Approximants decrease with j, so level j+1 lies below level j.
  if (sel.wants("comparison"))
    for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
      VerdictReport r = verify_comparison(runs[k + 1].data, runs[k].data, sel.tol("comparison", tolerance::comparison));
      r.note = "levels " + runs[k].meta.at("level") + " and " + runs[k + 1].meta.at("level");
      out.push_back(std::move(r));
    }
  std::vector<Trajectory> trajs;
  for (const auto& s : runs) trajs.push_back(s.data.traj);
  if (sel.wants("oscillation_spread") && runs.size() > 1)
    out.push_back(verify_oscillation_spread(trajs, cfg.initial.kind, sel.tol("oscillation_spread", tolerance::osc_spread)));
  if (sel.wants("lelong_attenuation") && cfg.initial.kind == PotentialKind::Lelong && !cfg.lelong_times.empty()) {
    const auto seq = approximation_sequence(cfg.initial, cfg.grid, cfg.levels, cfg.truncation);
    LelongAttenuationInput in;
    in.seq = &seq;
    in.runs = &trajs;
    in.config = runs.front().data.config;
    in.gamma = cfg.initial.gamma;
    in.beta = cfg.lelong_beta;
    in.times = cfg.lelong_times;
    for (auto& r : verify_lelong_attenuation(in, sel.tol("lelong_attenuation", tolerance::lelong)))
      out.push_back(std::move(r));
  }
  return out;
}

}  // namespace maflow
