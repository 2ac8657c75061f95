// maflow: run, verify, restart and compare flow trajectories; emit oracle data.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "maflow/commands.hpp"
#include "maflow/elliptic.hpp"
#include "maflow/field_io.hpp"
#include "maflow/geometry.hpp"
#include "maflow/oracle.hpp"

namespace fs = std::filesystem;
using namespace maflow;

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kVerification = 4 };

void print_verdicts(const std::vector<VerdictReport>& reports) {
  for (const auto& r : reports) {
    std::printf("%-8s %-20s slack=%-12.4g t=%-8.4g%s%s%s\n", to_string(r.status).c_str(), r.name.c_str(), r.slack, r.t,
                r.advisory ? " [advisory]" : "", r.note.empty() ? "" : "  ", r.note.c_str());
  }
}

int cmd_run(const std::string& config_path, const std::string& out) {
  const RunConfig cfg = load_run_config(config_path);
  const fs::path dir = resolve_output(out.empty() ? fs::path(cfg.directory) : fs::path(out));
  const RunSummary s = execute_run(cfg, dir);
  std::printf("wrote %zu trajectory(ies) to %s (%ld steps)\n", s.trajectories.size(), dir.string().c_str(), s.steps);
  return kOk;
}

int cmd_verify(const std::string& dir_arg, const std::vector<std::string>& checks, const std::string& out) {
  const fs::path dir = resolve_output(dir_arg);
  const auto reports = verify_directory(dir, checks);
  const fs::path target = out.empty() ? dir / "verdicts.json" : resolve_output(out);
  write_verdicts(target, reports);
  print_verdicts(reports);
  const bool ok = all_passed(reports);
  std::printf("%s (%s)\n", ok ? "all checks passed" : "verification failed", target.string().c_str());
  return ok ? kOk : kVerification;
}

int cmd_restart(const std::string& src, double from, std::optional<double> horizon, const std::string& out) {
  const fs::path dir = resolve_output(out);
  const RunSummary s = execute_restart(resolve_output(src), from, dir, horizon);
  std::printf("restarted into %s (%ld steps)\n", dir.string().c_str(), s.steps);
  return kOk;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& out) {
  const StoredRun ra = read_trajectory(resolve_output(a));
  const StoredRun rb = read_trajectory(resolve_output(b));
  const CompareReport rep = compare_runs(ra.data.traj, rb.data.traj);
  if (!out.empty()) write_compare_csv(resolve_output(out), rep);
  std::printf("t,min_diff,max_diff,l1\n");
  for (const auto& r : rep.rows) std::printf("%.17g,%.17g,%.17g,%.17g\n", r.t, r.min_diff, r.max_diff, r.l1);
  std::printf("min_diff %.6g  max_abs %.6g\n", rep.min_diff, rep.max_abs);
  return kOk;
}

struct OracleArgs {
  int n = 1;
  int res = 32;
  double period = 1.0;
  std::string modes;
  double eps = 4e-3;
  int count = 3;
  double t = 0.05;
  double alpha = 1.0;
  double gamma = 1.0;
  std::string out = "oracle";
};

int cmd_oracle(const std::string& name, const OracleArgs& a) {
  const TorusGrid grid = TorusGrid::make(a.n, a.res, a.period);
  const fs::path dir = resolve_output(a.out);
  fs::create_directories(dir);
  if (name == "heat") {
    const auto modes = parse_modes(a.modes.empty() ? (a.n == 1 ? "1 cos 1 0" : "1 cos 1 0 0 0") : a.modes, a.n);
    const auto rows = heat_limit_study(modes, grid, a.eps, a.count, a.t, FlowConfig{});
    std::ofstream csv(dir / "heat_limit.csv");
    csv << "eps,error,ratio\n";
    std::printf("kappa = %g\neps,error,ratio\n", kHeatKappa);
    for (const auto& r : rows) {
      char line[128];
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", r.eps, r.error, r.ratio);
      csv << line;
      std::fputs(line, stdout);
    }
    std::vector<Mode> scaled = modes;
    for (auto& m : scaled) m.amp *= a.eps;
    save_snapshot(dir / "heat.mafl", heat_oracle(scaled, grid, a.t), a.t);
    return kOk;
  }
  if (name == "elliptic") {
    const Field u = a.modes.empty() ? Field(grid) : modes_field(parse_modes(a.modes, a.n), grid);
    const Field g = manufactured_rhs(u, a.alpha, TwistSpec{}, 0.0, Field());
    const EllipticResult res = solve_ma(a.alpha, g, TwistSpec{}, 0.0, Field());
    write_newton_log(dir / "newton_log.csv", res.log);
    save_snapshot(dir / "u_exact.mafl", u, 0.0);
    save_snapshot(dir / "u_solved.mafl", res.u, 0.0);
    std::printf("newton iterations %d  residual %.3g  |u - u_exact|_inf %.3g\n", res.iterations, res.residual,
                sup_distance(res.u, u));
    return kOk;
  }
  if (name == "lelong") {
    const LelongOracle o = lelong_oracle(a.gamma, grid);
    save_snapshot(dir / "lelong.mafl", o.phi, 0.0);
    std::printf("nu %.6g  estimated %.6g\n", o.nu, lelong_estimate(o.phi, o.z0));
    return kOk;
  }
  throw ConfigError("unknown oracle '" + name + "' (heat, elliptic, lelong)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parabolic complex Monge-Ampere flows on flat tori"};
  app.require_subcommand(1);

  std::string config_path, out, dir, src, run_a, run_b, oracle_name;
  std::vector<std::string> checks;
  double from = 0.0;
  std::optional<double> horizon;
  OracleArgs oa;

  auto* run_cmd = app.add_subcommand("run", "Run the flow described by a configuration file");
  run_cmd->add_option("config", config_path, "INI configuration")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--out", out, "Output directory (default: [output] directory)");

  auto* verify_cmd = app.add_subcommand("verify", "Check a stored trajectory");
  verify_cmd->add_option("dir", dir, "Trajectory directory")->required();
  verify_cmd->add_option("-c,--checks", checks, "Check names (default: from run.cfg)")->delimiter(',');
  verify_cmd->add_option("-o,--out", out, "Verdict file (default: <dir>/verdicts.json)");

  auto* restart_cmd = app.add_subcommand("restart", "Continue a stored run from one of its records");
  restart_cmd->add_option("source", src, "Trajectory directory")->required();
  restart_cmd->add_option("--from", from, "Record time to restart from")->required();
  restart_cmd->add_option("--T", horizon, "New horizon");
  restart_cmd->add_option("-o,--out", out, "Output directory")->required();

  auto* compare_cmd = app.add_subcommand("compare", "Paired differences b - a of two runs");
  compare_cmd->add_option("a", run_a, "First trajectory directory")->required();
  compare_cmd->add_option("b", run_b, "Second trajectory directory")->required();
  compare_cmd->add_option("-o,--out", out, "CSV output");

  auto* oracle_cmd = app.add_subcommand("oracle", "Reference solutions: heat, elliptic, lelong");
  oracle_cmd->add_option("name", oracle_name, "heat | elliptic | lelong")->required();
  oracle_cmd->add_option("--n", oa.n, "Complex dimension");
  oracle_cmd->add_option("--res", oa.res, "Points per axis");
  oracle_cmd->add_option("--period", oa.period, "Torus period");
  oracle_cmd->add_option("--modes", oa.modes, "Mode list");
  oracle_cmd->add_option("--eps", oa.eps, "heat: largest amplitude");
  oracle_cmd->add_option("--count", oa.count, "heat: number of amplitudes");
  oracle_cmd->add_option("--t", oa.t, "heat: time");
  oracle_cmd->add_option("--alpha", oa.alpha, "elliptic: alpha");
  oracle_cmd->add_option("--gamma", oa.gamma, "lelong: gamma");
  oracle_cmd->add_option("-o,--out", oa.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run_cmd) return cmd_run(config_path, out);
    if (*verify_cmd) return cmd_verify(dir, checks, out);
    if (*restart_cmd) return cmd_restart(src, from, horizon, out);
    if (*compare_cmd) return cmd_compare(run_a, run_b, out);
    if (*oracle_cmd) return cmd_oracle(oracle_name, oa);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfig;
  } catch (const ConfigMismatch& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfig;
  } catch (const InvalidSpec& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kConfig;
  } catch (const Error& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.describe().c_str());
    return kSolver;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kConfig;
  }
  return kOk;
}
