#pragma once

// Raw field snapshots:
//   "CEA1 <ndim> <n1> [n2] [n3] <L1> [L2] [L3]\n" followed by the values as
//   row-major little-endian IEEE-754 doubles.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "contactea/grid.hpp"

namespace contactea {

namespace detail {
inline std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
}
}  // namespace detail

inline void write_snapshot(std::ostream& os, const ScalarField& field) {
  const Grid& g = field.grid();
  std::string header = "CEA1 " + std::to_string(g.ndim());
  for (std::size_t a = 0; a < g.ndim(); ++a) header += " " + std::to_string(g.size(a));
  char buf[40];
  for (std::size_t a = 0; a < g.ndim(); ++a) {
    std::snprintf(buf, sizeof buf, " %.17g", g.length(a));
    header += buf;
  }
  header += '\n';
  os.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (double v : field.values()) {
    const std::uint64_t le = detail::to_little_endian(std::bit_cast<std::uint64_t>(v));
    os.write(reinterpret_cast<const char*>(&le), sizeof le);
  }
  if (!os) throw std::runtime_error("write_snapshot: stream error");
}

inline ScalarField read_snapshot(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("read_snapshot: missing header");
  std::istringstream hs(header);
  std::string magic;
  std::size_t ndim = 0;
  hs >> magic >> ndim;
  if (magic != "CEA1") throw std::runtime_error("read_snapshot: bad magic '" + magic + "'");
  if (ndim < 1 || ndim > 3) throw std::runtime_error("read_snapshot: bad dimension count");
  std::vector<std::size_t> dims(ndim);
  std::vector<double> lengths(ndim);
  for (auto& d : dims) hs >> d;
  for (auto& l : lengths) hs >> l;
  if (!hs) throw std::runtime_error("read_snapshot: malformed header '" + header + "'");
  Grid grid(dims, lengths);
  std::vector<double> values(grid.total());
  for (double& v : values) {
    std::uint64_t le = 0;
    if (!is.read(reinterpret_cast<char*>(&le), sizeof le)) throw std::runtime_error("read_snapshot: truncated data");
    v = std::bit_cast<double>(detail::to_little_endian(le));
  }
  return ScalarField(std::move(grid), std::move(values));
}

inline void save_snapshot(const std::string& path, const ScalarField& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_snapshot: cannot open " + path);
  write_snapshot(os, field);
}

inline ScalarField load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_snapshot: cannot open " + path);
  return read_snapshot(is);
}

}  // namespace contactea
