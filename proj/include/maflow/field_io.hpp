#pragma once

#include <filesystem>

#include "maflow/grid.hpp"

namespace maflow {

/// Binary field snapshot:
///   "MAFL" | u32 version | u32 n | u32 res | f64 period | f64 time | f64[res^(2n)]
/// All numbers little-endian, values in grid (row-major) order.
struct Snapshot {
  Field field;
  double time = 0.0;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

void save_snapshot(const std::filesystem::path& path, const Field& f, double time);
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace maflow
