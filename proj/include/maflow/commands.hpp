#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "maflow/config.hpp"
#include "maflow/run_io.hpp"
#include "maflow/verifier.hpp"

namespace maflow {

struct RunSummary {
  std::filesystem::path directory;
  /// One entry per written trajectory (several with run = all).
  std::vector<std::filesystem::path> trajectories;
  long steps = 0;
};

/// Samples the initial data, runs the flow and writes the trajectory to
/// `dir` (level_J subdirectories with run = all). Smooth and file data are
/// run as given; other data run their finest approximant. A solver error
/// leaves failure.json with the message and time in `dir` and is rethrown.
RunSummary execute_run(const RunConfig& config, const std::filesystem::path& dir);

/// Continues the run stored in `source` from its record at `from` up to
/// `horizon` (default: the stored horizon) and writes it to `dir`, with
/// restart_of and restart_time in meta.txt.
RunSummary execute_restart(const std::filesystem::path& source, double from, const std::filesystem::path& dir,
                           std::optional<double> horizon = std::nullopt);

/// Checks on a trajectory directory written by execute_run or
/// execute_restart. `checks` overrides the stored [verify] checks.
/// Per-level reports carry "level j" in their note; comparison and
/// oscillation_spread run between levels; minodot needs a restart directory.
std::vector<VerdictReport> verify_directory(const std::filesystem::path& dir,
                                            const std::vector<std::string>& checks = {});

/// Level subdirectories of a run = all directory, finest last.
std::vector<std::filesystem::path> level_directories(const std::filesystem::path& dir);

}  // namespace maflow
