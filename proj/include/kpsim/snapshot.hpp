#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "kpsim/field.hpp"

namespace kpsim {

// Layout: "KPLB1", u64 Nx, u64 Ny, f64 Lx, f64 Ly, f64 t, then Nx*Ny f64
// values (x-major). All numbers little-endian.
inline constexpr std::array<char, 5> kSnapshotMagic{'K', 'P', 'L', 'B', '1'};
inline constexpr std::size_t kSnapshotHeaderBytes = 5 + 5 * 8;

namespace detail {
inline void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b;
  for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xff);
  os.write(b.data(), 8);
}
inline std::uint64_t get_u64(std::istream& is, const std::string& path) {
  std::array<unsigned char, 8> b;
  if (!is.read(reinterpret_cast<char*>(b.data()), 8)) throw FormatError("truncated snapshot '" + path + "'");
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) v = (v << 8) | b[k];
  return v;
}
inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
inline double get_f64(std::istream& is, const std::string& path) {
  return std::bit_cast<double>(get_u64(is, path));
}
}  // namespace detail

inline void save_snapshot(const Field& f, double t, const std::string& path) {
  const Field p = to_physical(f);
  const auto& g = f.grid();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os.write(kSnapshotMagic.data(), kSnapshotMagic.size());
  detail::put_u64(os, g.nx());
  detail::put_u64(os, g.ny());
  detail::put_f64(os, g.lx());
  detail::put_f64(os, g.ly());
  detail::put_f64(os, t);
  for (double v : p.physical()) detail::put_f64(os, v);
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

struct Snapshot {
  Field field;
  double t;
};

inline Snapshot load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open snapshot '" + path + "'");
  std::array<char, 5> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kSnapshotMagic)
    throw FormatError("'" + path + "' is not a KPLB1 snapshot");
  const std::uint64_t nx = detail::get_u64(is, path);
  const std::uint64_t ny = detail::get_u64(is, path);
  const double lx = detail::get_f64(is, path);
  const double ly = detail::get_f64(is, path);
  const double t = detail::get_f64(is, path);
  if (nx > (1u << 20) || ny > (1u << 20)) throw FormatError("implausible snapshot dimensions in '" + path + "'");
  GridPtr g;
  try {
    g = make_grid(lx, ly, nx, ny);
  } catch (const ConfigError& e) {
    throw FormatError("bad snapshot header in '" + path + "': " + e.what());
  }
  is.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::uint64_t>(is.tellg());
  if (bytes != kSnapshotHeaderBytes + 8 * nx * ny)
    throw FormatError("snapshot '" + path + "' payload does not match its " + std::to_string(nx) + "x" +
                      std::to_string(ny) + " header");
  is.seekg(static_cast<std::streamoff>(kSnapshotHeaderBytes));
  RealArray v(nx * ny);
  for (auto& x : v) x = detail::get_f64(is, path);
  return {Field::from_physical(g, std::move(v)), t};
}

}  // namespace kpsim
