#include "maflow/run_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "maflow/field_io.hpp"
#include "maflow/geometry.hpp"

namespace maflow {

namespace fs = std::filesystem;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s, const fs::path& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw IoError("bad number '" + s + "' in " + where.string());
  return v;
}

std::string snapshot_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%05zu.mafl", k);
  return buf;
}

}  // namespace

fs::path output_root() {
  if (const char* root = std::getenv("MAFLOW_OUTPUT_ROOT"); root != nullptr && *root != '\0') return root;
  return fs::current_path();
}

fs::path resolve_output(const fs::path& dir) { return dir.is_absolute() ? dir : output_root() / dir; }

void write_series_csv(const fs::path& path, const FunctionalSeries& series) {
  auto out = open_out(path);
  const auto& cols = FunctionalRow::columns();
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << "\n";
  for (const auto& row : series.rows) {
    const auto v = row.values();
    for (std::size_t k = 0; k < v.size(); ++k) out << (k ? "," : "") << g17(v[k]);
    out << "\n";
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

FunctionalSeries read_series_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty series file " + path.string());
  if (split_csv(line) != FunctionalRow::columns()) throw IoError("unexpected series header in " + path.string());
  FunctionalSeries s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != FunctionalRow::columns().size()) throw IoError("short series row in " + path.string());
    std::vector<double> v;
    for (const auto& c : cells) v.push_back(parse_double(c, path));
    s.rows.push_back(FunctionalRow::from_values(v));
  }
  return s;
}

void write_trajectory(const fs::path& dir, const Trajectory& traj, const RunConfig& config, const FlowConfig& flow,
                      PotentialKind data, const std::map<std::string, std::string>& extra_meta) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  open_out(dir / "run.cfg") << to_ini(config);
  {
    auto meta = open_out(dir / "meta.txt");
    meta << "schema = " << kConfigSchema << "\ndata = " << to_string(data) << "\nsteps = " << traj.steps
         << "\nrejected = " << traj.rejected << "\nrecords = " << traj.records.size() << "\n";
    for (const auto& [k, v] : extra_meta) meta << k << " = " << v << "\n";
  }
  write_series_csv(dir / "series.csv", traj.series);

  auto idx = open_out(dir / "records.csv");
  idx << "index,t,step,min_eig,file\n";
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    const auto& r = traj.records[k];
    idx << k << "," << g17(r.t) << "," << r.step << "," << g17(r.min_eig) << ",";
    if (!r.phi.empty()) {
      idx << snapshot_name(k);
      save_snapshot(dir / snapshot_name(k), r.phi, r.t);
    }
    idx << "\n";
  }
  if (!flow.h.empty()) save_snapshot(dir / "h.mafl", flow.h, 0.0);
  if (flow.twist.has_psi()) save_snapshot(dir / "psi_chi.mafl", flow.twist.psi_chi, 0.0);
}

StoredRun read_trajectory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("no trajectory directory '" + dir.string() + "'");
  StoredRun out;
  try {
    out.config = load_run_config((dir / "run.cfg").string());
  } catch (const ConfigError& e) {
    throw IoError(std::string("run.cfg: ") + e.what());
  }

  std::map<std::string, std::string> meta;
  {
    auto in = open_in(dir / "meta.txt");
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos) meta[line.substr(0, eq)] = line.substr(eq + 3);
    }
  }
  out.meta = meta;
  try {
    out.data.data = potential_kind_from_string(meta.at("data"));
    out.data.traj.steps = std::stol(meta.at("steps"));
    out.data.traj.rejected = std::stol(meta.at("rejected"));
  } catch (const std::exception& e) {
    throw IoError("malformed meta.txt in " + dir.string() + ": " + e.what());
  }

  FlowConfig flow = out.config.flow_config().prepared(out.config.grid);
  if (fs::exists(dir / "h.mafl")) flow.h = load_snapshot(dir / "h.mafl").field;
  if (fs::exists(dir / "psi_chi.mafl")) flow.twist.psi_chi = load_snapshot(dir / "psi_chi.mafl").field;
  out.data.config = flow;
  out.data.traj.series = read_series_csv(dir / "series.csv");

  auto idx = open_in(dir / "records.csv");
  std::string line;
  std::getline(idx, line);
  while (std::getline(idx, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() == 4) cells.emplace_back();
    if (cells.size() != 5) throw IoError("malformed records.csv row '" + line + "'");
    TrajectoryRecord r;
    r.t = parse_double(cells[1], dir / "records.csv");
    r.step = std::stol(cells[2]);
    r.min_eig = parse_double(cells[3], dir / "records.csv");
    if (!cells[4].empty()) {
      Snapshot s = load_snapshot(dir / cells[4]);
      if (s.field.grid != out.config.grid) throw IoError(cells[4] + " does not match the configured grid");
      r.phi = std::move(s.field);
      r.phi_dot = rhs(r.t, r.phi, flow);
    }
    out.data.traj.records.push_back(std::move(r));
  }
  return out;
}

std::string verdicts_json(const std::vector<VerdictReport>& reports) {
  using nlohmann::json;
  auto number = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json checks = json::array();
  for (const auto& r : reports) {
    checks.push_back({{"name", r.name},
                      {"anchor", r.anchor},
                      {"status", to_string(r.status)},
                      {"advisory", r.advisory},
                      {"slack", number(r.slack)},
                      {"t", number(r.t)},
                      {"index", r.index},
                      {"tolerance", number(r.tolerance)},
                      {"gated_on", r.gated_on},
                      {"note", r.note}});
  }
  json doc{{"checks", checks}, {"passed", all_passed(reports)}};
  return doc.dump(2) + "\n";
}

void write_verdicts(const fs::path& path, const std::vector<VerdictReport>& reports) {
  open_out(path) << verdicts_json(reports);
}

void write_newton_log(const fs::path& path, const std::vector<NewtonLogRow>& log) {
  auto out = open_out(path);
  out << "iteration,residual,damping,inner_iterations\n";
  for (const auto& r : log) out << r.iteration << "," << g17(r.residual) << "," << g17(r.damping) << "," << r.inner_iterations << "\n";
}

CompareReport compare_runs(const Trajectory& a, const Trajectory& b) {
  CompareReport rep;
  rep.min_diff = std::numeric_limits<double>::infinity();
  for (const auto& ra : a.records) {
    const TrajectoryRecord* rb = b.at(ra.t);
    if (rb == nullptr || ra.phi.empty() || rb->phi.empty()) continue;
    if (ra.phi.grid != rb->phi.grid) throw ConfigMismatch("runs live on different grids");
    Field d = rb->phi - ra.phi;
    CompareRow row{ra.t, d.min(), d.max(), 0.0};
    Field ad(d.grid);
    for (std::size_t i = 0; i < d.size(); ++i) ad[i] = std::abs(d[i]);
    row.l1 = integrate(ad);
    rep.min_diff = std::min(rep.min_diff, row.min_diff);
    rep.max_abs = std::max({rep.max_abs, std::abs(row.min_diff), std::abs(row.max_diff)});
    rep.rows.push_back(row);
  }
  if (rep.rows.empty()) throw ConfigMismatch("the runs share no record time with stored fields");
  return rep;
}

void write_compare_csv(const fs::path& path, const CompareReport& report) {
  auto out = open_out(path);
  out << "t,min_diff,max_diff,l1\n";
  for (const auto& r : report.rows)
    out << g17(r.t) << "," << g17(r.min_diff) << "," << g17(r.max_diff) << "," << g17(r.l1) << "\n";
}

}  // namespace maflow
