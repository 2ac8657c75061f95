#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "maflow/config.hpp"
#include "maflow/elliptic.hpp"
#include "maflow/flow.hpp"
#include "maflow/verifier.hpp"

namespace maflow {

/// Directory named by MAFLOW_OUTPUT_ROOT, or the working directory.
std::filesystem::path output_root();
/// Absolute paths are kept; relative ones are placed under output_root().
std::filesystem::path resolve_output(const std::filesystem::path& dir);

/// Header line with FunctionalRow::columns(), then one row per record with
/// every value printed as %.17g.
void write_series_csv(const std::filesystem::path& path, const FunctionalSeries& series);
FunctionalSeries read_series_csv(const std::filesystem::path& path);

/// Trajectory directory layout:
///   run.cfg       canonical configuration (to_ini)
///   meta.txt      key = value: schema, data kind, steps, rejected, records
///   series.csv    functional series
///   records.csv   index, t, step, min_eig, snapshot file
///   snap_NNNNN.mafl   phi at each record
///   h.mafl, psi_chi.mafl   density exponent and twist potential (if set)
/// phi_dot is not stored; read_trajectory recomputes it.
/// `extra_meta` pairs are appended to meta.txt.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const RunConfig& config,
                      const FlowConfig& flow, PotentialKind data,
                      const std::map<std::string, std::string>& extra_meta = {});

struct StoredRun {
  RunConfig config;
  RunData data;
  std::map<std::string, std::string> meta;
};

/// Throws IoError for missing or malformed files.
StoredRun read_trajectory(const std::filesystem::path& dir);

/// Verdict list as a JSON document {"checks": [...], "passed": bool}.
std::string verdicts_json(const std::vector<VerdictReport>& reports);
void write_verdicts(const std::filesystem::path& path, const std::vector<VerdictReport>& reports);

void write_newton_log(const std::filesystem::path& path, const std::vector<NewtonLogRow>& log);

/// Paired differences b - a at the record times both runs share.
struct CompareRow {
  double t = 0.0;
  double min_diff = 0.0;
  double max_diff = 0.0;
  double l1 = 0.0;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  /// Smallest b - a over every shared record and gridpoint.
  double min_diff = 0.0;
  double max_abs = 0.0;
};

/// Throws ConfigMismatch when the grids differ or no record time is shared.
CompareReport compare_runs(const Trajectory& a, const Trajectory& b);
void write_compare_csv(const std::filesystem::path& path, const CompareReport& report);

}  // namespace maflow
