#include "maflow/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace maflow {

namespace {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <typename T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::filesystem::path& path) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw IoError("truncated snapshot " + path.string());
  return to_little(v);
}

}  // namespace

void save_snapshot(const std::filesystem::path& path, const Field& f, double time) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os.write("MAFL", 4);
  put<std::uint32_t>(os, kSnapshotVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.n));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.res));
  put<double>(os, f.grid.period);
  put<double>(os, time);
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  } else {
    for (double v : f.values) put<double>(os, v);
  }
  if (!os) throw IoError("write failed for " + path.string());
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "MAFL", 4) != 0)
    throw IoError("not a field snapshot: " + path.string());
  const auto version = get<std::uint32_t>(is, path);
  if (version != kSnapshotVersion)
    throw IoError("unsupported snapshot version " + std::to_string(version));
  const auto n = get<std::uint32_t>(is, path);
  const auto res = get<std::uint32_t>(is, path);
  const auto period = get<double>(is, path);
  Snapshot s;
  s.time = get<double>(is, path);
  TorusGrid g;
  try {
    g = TorusGrid::make(static_cast<int>(n), static_cast<int>(res), period);
  } catch (const InvalidSpec& e) {
    throw IoError(std::string("bad snapshot header: ") + e.what());
  }
  s.field = Field(g);
  if constexpr (std::endian::native == std::endian::little) {
    if (!is.read(reinterpret_cast<char*>(s.field.values.data()),
                 static_cast<std::streamsize>(g.size() * sizeof(double))))
      throw IoError("truncated snapshot " + path.string());
  } else {
    for (double& v : s.field.values) v = get<double>(is, path);
  }
  return s;
}

}  // namespace maflow
