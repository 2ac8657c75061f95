#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "maflow/commands.hpp"
#include "maflow/field_io.hpp"
#include "maflow/geometry.hpp"
#include "maflow/oracle.hpp"
#include "support.hpp"

using namespace maflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("maflow_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunConfig small_config() {
  return parse(R"(schema = 1
[grid]
n = 1
res = 16
[initial]
kind = smooth
modes = 0.02 cos 1 0, 0.01 sin 0 1
[flow]
T = 0.1
h_modes = 0.1 cos 1 1
[output]
record_interval = 0.02
)");
}

}  // namespace

TEST_CASE("configuration defaults and round trip") {
  const RunConfig d = parse("schema = 1\n");
  CHECK(d.grid == TorusGrid::make(1, 64, 1.0));
  CHECK(d.initial.kind == PotentialKind::Smooth);
  CHECK(d.levels == 3);
  CHECK(d.variant == Variant::CMAF);
  CHECK(d.T == 1.0);
  CHECK(d.policy == StepPolicy::RK4);
  CHECK(d.checks == std::vector<std::string>{"all"});
  CHECK(d.directory == "run");

  const RunConfig c = parse(R"(schema = 1
[grid]
n = 2
res = 16
period = 2
[initial]
kind = bounded_discontinuous ; trailing comment
depth = 2.5
modes = 0.05 cos 1 0 0 1, 0.01 sin 0 1 1 0
z0 = 0.3 0.4 0.5 0.6
levels = 4
run = all
[flow]
variant = cmaf
c = 0.5
psi_modes = 0.01 cos 1 0 0 0
T = 0.75
policy = semi_implicit
dealias = true
workers = 2
[verify]
checks = clef, sup_bound
tol_clef = 1e-4
lelong_times = 0.1, 0.2
[output]
directory = out/x
snapshot_times = 0.1 0.3
)");
  CHECK(c.grid.n == 2);
  CHECK(c.initial.kind == PotentialKind::BoundedDiscontinuous);
  REQUIRE(c.initial.modes.size() == 2);
  CHECK(c.initial.modes[1].sine);
  CHECK(c.initial.modes[1].m == std::array<int, 4>{0, 1, 1, 0});
  REQUIRE(c.initial.z0);
  CHECK((*c.initial.z0)[3] == 0.6);
  CHECK(c.run_all_levels);
  CHECK(c.policy == StepPolicy::SemiImplicit);
  CHECK(c.dealias);
  CHECK(c.checks == std::vector<std::string>{"clef", "sup_bound"});
  CHECK(c.tolerances.at("clef") == 1e-4);
  CHECK(c.snapshot_times == std::vector<double>{0.1, 0.3});

  const std::string text = to_ini(c);
  const RunConfig back = parse(text);
  CHECK(to_ini(back) == text);
  CHECK(back.initial.depth == c.initial.depth);
  CHECK(back.T == c.T);
  CHECK(back.lelong_times == c.lelong_times);
}

TEST_CASE("configuration errors name the key") {
  auto rejects = [](const std::string& text, const std::string& fragment) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
      return;
    }
    FAIL("accepted: " << text);
  };
  rejects("[grid]\nn = 1\n", "schema");
  rejects("schema = 2\n", "schema");
  rejects("schema = 1\n[flow]\nbogus = 1\n", "flow.bogus");
  rejects("schema = 1\n[extra]\nx = 1\n", "extra.x");
  rejects("schema = 1\n[grid]\nres = 12\n", "[grid]");
  rejects("schema = 1\n[grid]\nres = abc\n", "grid.res");
  rejects("schema = 1\n[flow]\nvariant = other\n", "flow.variant");
  rejects("schema = 1\n[initial]\nkind = nope\n", "initial.kind");
  rejects("schema = 1\n[initial]\nmodes = 0.1 cos 1\n", "mode list");
  rejects("schema = 1\n[verify]\nchecks = clef, made_up\n", "made_up");
  rejects("schema = 1\n[flow]\nsafety = 2\n", "safety");
  rejects("schema = 1\n[initial]\nkind = file\n", "path");
}

TEST_CASE("mode lists") {
  const auto one = parse_modes("0.5 cos 1 0, -0.25 sin 2 3", 1);
  REQUIRE(one.size() == 2);
  CHECK(one[1].amp == -0.25);
  CHECK(one[1].sine);
  CHECK(one[1].m[1] == 3);
  CHECK(parse_modes(format_modes(one, 1), 1).size() == 2);
  CHECK(format_modes(parse_modes(format_modes(one, 1), 1), 1) == format_modes(one, 1));
  CHECK(parse_modes("0.5 cos 1 0 0.25 sin 2 3", 1).size() == 2);
  CHECK(parse_modes("", 1).empty());
  CHECK(parse_modes("1 cos 1 0 0 1", 2)[0].m == std::array<int, 4>{1, 0, 0, 1});
  CHECK_THROWS_AS(parse_modes("1 tan 1 0", 1), ConfigError);
  CHECK_THROWS_AS(parse_modes("1 cos 1 0 0", 1), ConfigError);
}

TEST_CASE("snapshots round trip bit-exactly") {
  const fs::path dir = scratch("snap");
  fs::create_directories(dir);
  for (int n : {1, 2}) {
    auto g = TorusGrid::make(n, n == 1 ? 32 : 8, 1.5);
    auto f = testsupport::random_band_limited(g, 3, 1.0, 900 + n);
    save_snapshot(dir / "f.mafl", f, 0.125);
    const Snapshot s = load_snapshot(dir / "f.mafl");
    CHECK(s.time == 0.125);
    CHECK(s.field.grid == g);
    CHECK(f.values == s.field.values);
  }
  CHECK_THROWS_AS(load_snapshot(dir / "missing.mafl"), IoError);
}

TEST_CASE("trajectory directories round trip") {
  const fs::path dir = scratch("traj");
  const RunConfig cfg = small_config();
  const FlowConfig flow = cfg.flow_config().prepared(cfg.grid);
  const Trajectory tr = run(sample_potential(cfg.initial, cfg.grid), flow);
  write_trajectory(dir, tr, cfg, flow, cfg.initial.kind);

  const StoredRun back = read_trajectory(dir);
  CHECK(to_ini(back.config) == to_ini(cfg));
  CHECK(back.data.data == PotentialKind::Smooth);
  CHECK(back.data.traj.steps == tr.steps);
  REQUIRE(back.data.traj.records.size() == tr.records.size());
  for (std::size_t k = 0; k < tr.records.size(); ++k) {
    const auto& a = tr.records[k];
    const auto& b = back.data.traj.records[k];
    CHECK(a.t == b.t);
    CHECK(a.step == b.step);
    CHECK(a.min_eig == b.min_eig);
    CHECK(a.phi.values == b.phi.values);
    // phi_dot is recomputed from the stored phi.
    CHECK(sup_distance(a.phi_dot, b.phi_dot) <= 1e-13);
  }
  REQUIRE(back.data.traj.series.rows.size() == tr.series.rows.size());
  for (std::size_t k = 0; k < tr.series.rows.size(); ++k)
    CHECK(back.data.traj.series.rows[k].values() == tr.series.rows[k].values());
  CHECK(flow.h.values == back.data.config.h.values);

  CHECK_THROWS_AS(read_trajectory(dir / "nope"), IoError);
}

TEST_CASE("runs write byte-identical artifacts") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const RunConfig cfg = small_config();
  execute_run(cfg, a);
  execute_run(cfg, b);
  CHECK(slurp(a / "series.csv") == slurp(b / "series.csv"));
  CHECK(slurp(a / "records.csv") == slurp(b / "records.csv"));
  CHECK(slurp(a / "snap_00003.mafl") == slurp(b / "snap_00003.mafl"));
}

TEST_CASE("T = 0 writes only the initial snapshot") {
  const fs::path dir = scratch("t0");
  RunConfig cfg = small_config();
  cfg.T = 0.0;
  execute_run(cfg, dir);
  CHECK(fs::exists(dir / "snap_00000.mafl"));
  CHECK_FALSE(fs::exists(dir / "snap_00001.mafl"));
  CHECK(read_series_csv(dir / "series.csv").rows.size() == 1);
}

TEST_CASE("verification of stored runs") {
  const fs::path dir = scratch("verify");
  auto g = TorusGrid::make(1, 32);
  RunConfig cfg = small_config();
  cfg.grid = g;
  cfg.h_modes.clear();
  cfg.initial = PotentialSpec::from_file((dir.parent_path() / "maflow_test_fixed.mafl").string());

  // A fixed point of the flow: h = 0 and phi_0 = 0 up to a constant.
  save_snapshot(cfg.initial.path, Field(g, 0.25), 0.0);
  execute_run(cfg, dir);
  const auto reports = verify_directory(dir);
  CHECK(all_passed(reports));
  for (const auto& r : reports) CHECK_MESSAGE(r.status != VerdictStatus::Fail, r.name);

  // Advisory failures do not count.
  auto advisory = reports;
  VerdictReport extra = advisory.back();
  extra.advisory = true;
  extra.status = VerdictStatus::Fail;
  advisory.push_back(extra);
  CHECK(all_passed(advisory));
  const auto doc = nlohmann::json::parse(verdicts_json(advisory));
  CHECK(doc["passed"] == true);
  CHECK(doc["checks"].size() == advisory.size());

  // Inflate the sup column of the last series row.
  {
    std::istringstream in(slurp(dir / "series.csv"));
    std::ostringstream out;
    std::string line, last;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    auto cells = std::vector<std::string>();
    std::stringstream ss(lines.back());
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    cells[1] = "1";
    lines.back().clear();
    for (std::size_t k = 0; k < cells.size(); ++k) lines.back() += (k ? "," : "") + cells[k];
    for (const auto& l : lines) out << l << "\n";
    std::ofstream(dir / "series.csv") << out.str();
  }
  const auto tampered = verify_directory(dir, {"sup_bound"});
  REQUIRE(tampered.size() == 1);
  CHECK(tampered[0].status == VerdictStatus::Fail);
  CHECK_FALSE(all_passed(tampered));
  CHECK_THROWS_AS(verify_directory(dir, {"no_such_check"}), ConfigError);
}

TEST_CASE("restart and compare") {
  const fs::path src = scratch("restart_src"), dst = scratch("restart_dst");
  const RunConfig cfg = small_config();
  execute_run(cfg, src);
  execute_restart(src, 0.04, dst);
  const StoredRun a = read_trajectory(src), b = read_trajectory(dst);
  CHECK(b.meta.at("restart_time") == "0.040000000000000001");

  const CompareReport same = compare_runs(a.data.traj, b.data.traj);
  CHECK(same.max_abs == 0.0);
  CHECK(same.rows.front().t == doctest::Approx(0.04));

  const auto reports = verify_directory(dst, {"minodot"});
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].name == "semigroup");
  CHECK(all_passed(reports));

  // Shifted data: phi_t + 0.3 solves the same flow.
  Trajectory shifted = a.data.traj;
  for (auto& r : shifted.records) r.phi += 0.3;
  const CompareReport diff = compare_runs(a.data.traj, shifted);
  for (const auto& r : diff.rows) {
    CHECK(r.min_diff == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r.max_diff == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r.l1 == doctest::Approx(0.3).epsilon(1e-12));
  }
  CHECK_THROWS_AS(execute_restart(src, 0.033, scratch("restart_bad")), ConfigError);
}

TEST_CASE("level runs and the comparison slack") {
  const fs::path dir = scratch("levels");
  RunConfig cfg = parse(R"(schema = 1
[grid]
n = 1
res = 32
period = 2
[initial]
kind = zero_lelong
exponent = 0.5
levels = 2
run = all
[flow]
T = 0.05
[verify]
checks = comparison, sup_bound, clef, density_monotone, density_min
[output]
record_interval = 0.025
)");
  const auto sum = execute_run(cfg, dir);
  REQUIRE(sum.trajectories.size() == 2);
  const auto levels = level_directories(dir);
  REQUIRE(levels.size() == 2);
  const StoredRun coarse = read_trajectory(levels[0]), fine = read_trajectory(levels[1]);
  // compare(fine, coarse) reports coarse - fine, the quantity verify_comparison bounds.
  const CompareReport rep = compare_runs(fine.data.traj, coarse.data.traj);
  const VerdictReport v = verify_comparison(fine.data, coarse.data);
  CHECK(rep.min_diff == v.slack);
  const auto reports = verify_directory(dir);
  CHECK(reports.size() == 2 * 4 + 1);
  CHECK(all_passed(reports));
}

TEST_CASE("solver failures leave a report with the time") {
  const fs::path dir = scratch("failure");
  RunConfig cfg = small_config();
  cfg.initial.modes = {Mode{0.3, false, {1, 0, 0, 0}}};
  CHECK_THROWS_AS(execute_run(cfg, dir), KaehlerConeViolation);
  const auto doc = nlohmann::json::parse(slurp(dir / "failure.json"));
  CHECK(doc["time"] == 0.0);
  CHECK(doc["error"].get<std::string>().find("KaehlerConeViolation") != std::string::npos);
}

TEST_CASE("output root from the environment") {
  ::setenv("MAFLOW_OUTPUT_ROOT", "/tmp/maflow_root", 1);
  CHECK(resolve_output("a/b") == fs::path("/tmp/maflow_root/a/b"));
  CHECK(resolve_output("/abs") == fs::path("/abs"));
  ::unsetenv("MAFLOW_OUTPUT_ROOT");
  CHECK(resolve_output("a") == fs::current_path() / "a");
}

TEST_CASE("oracles") {
  auto g = TorusGrid::make(1, 32);
  const std::vector<Mode> m{{1.0, false, {1, 0, 0, 0}}};
  // Separation of variables: cos(2 pi x) decays like exp(-pi^2 t) under (1/4) Lap.
  const Field h = heat_oracle(m, g, 0.05);
  CHECK(sup_distance(h, std::exp(-testsupport::pi * testsupport::pi * 0.05) * modes_field(m, g)) < 1e-15);
  const auto rows = heat_limit_study(m, g, 4e-3, 3, 0.05, FlowConfig{});
  REQUIRE(rows.size() == 3);
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].ratio == doctest::Approx(4.0).epsilon(0.1));

  // u = 0 solves the elliptic problem with g = n log alpha.
  const Field g0 = manufactured_rhs(Field(g), 2.0, TwistSpec{}, 0.0, Field());
  CHECK(sup_distance(g0, Field(g, std::log(2.0))) < 1e-15);
  const Field u = 0.02 * modes_field(m, g);
  const auto sol = solve_ma(1.0, manufactured_rhs(u, 1.0, TwistSpec{}, 0.0, Field()), TwistSpec{}, 0.0, Field());
  CHECK(sup_distance(sol.u, u) < 1e-9);

  auto gl = TorusGrid::make(1, 128, 2.0);
  const LelongOracle lo = lelong_oracle(1.0, gl);
  CHECK(lo.nu == 1.0);
  CHECK(lelong_estimate(lo.phi, lo.z0) == doctest::Approx(1.0).epsilon(0.05));
}
