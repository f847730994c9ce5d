#pragma once
// Solution dumps. CSV: one row per (layer, node). Binary: a 16-byte header
// ('HLAB', version, n, Nt as little-endian u32), a grid block, then values in
// layer-major order as little-endian IEEE doubles.
//
// Grid block (version 1): nodes per axis (n x u32), t0, t1, then lo and hi
// per axis (f64 each). Nt is the number of time steps; Nt + 1 layers follow.

#include <bit>
#include <cstring>
#include <fstream>
#include <ostream>

#include "hlab/solver.hpp"

namespace hlab {

inline constexpr std::uint32_t kBinaryVersion = 1;

/// Writes layers 0, stride, 2 stride, ... and always the last layer.
inline void write_csv(std::ostream& os, const Solution& s, int stride = 1) {
  const auto& g = s.grid;
  os << "k,t";
  for (int a = 0; a < g.n; ++a) os << ",x" << a + 1;
  os << ",active,u\n";
  stride = std::max(1, stride);
  for (int k = 0; k <= g.steps; ++k) {
    if (k % stride != 0 && k != g.steps) continue;
    const std::string t = fmt17(g.time(k));
    for (std::size_t i = 0; i < s.nodes(); ++i) {
      os << k << ',' << t;
      for (double v : g.node(i)) os << ',' << fmt17(v);
      os << ',' << int(s.active[i]) << ',' << fmt17(s.at(k, i)) << '\n';
    }
  }
}

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_f64(std::ostream& os, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw ParseError("truncated HLAB file");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw ParseError("truncated HLAB file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return std::bit_cast<double>(v);
}

}  // namespace detail

inline void write_binary(std::ostream& os, const Solution& s) {
  const auto& g = s.grid;
  os.write("HLAB", 4);
  detail::put_u32(os, kBinaryVersion);
  detail::put_u32(os, static_cast<std::uint32_t>(g.n));
  detail::put_u32(os, static_cast<std::uint32_t>(g.steps));
  for (int a = 0; a < g.n; ++a) detail::put_u32(os, static_cast<std::uint32_t>(g.nodes[a]));
  detail::put_f64(os, g.t0);
  detail::put_f64(os, g.t1);
  for (int a = 0; a < g.n; ++a) {
    detail::put_f64(os, g.lo[a]);
    detail::put_f64(os, g.hi[a]);
  }
  for (double v : s.values) detail::put_f64(os, v);
}

/// Grid and values read back from a binary dump; the scheme is not stored.
struct BinarySolution {
  GridSpec grid;
  std::vector<double> values;
};

inline BinarySolution read_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "HLAB", 4) != 0)
    throw ParseError("not an HLAB file (bad magic)");
  const auto version = detail::get_u32(is);
  if (version != kBinaryVersion)
    throw ParseError("unsupported HLAB version " + std::to_string(version));
  BinarySolution out;
  auto& g = out.grid;
  g.n = static_cast<int>(detail::get_u32(is));
  if (g.n != 1 && g.n != 2) throw ParseError("HLAB file has unsupported dimension");
  g.steps = static_cast<int>(detail::get_u32(is));
  g.nodes.assign(g.n, 0);
  for (int a = 0; a < g.n; ++a) g.nodes[a] = static_cast<int>(detail::get_u32(is));
  g.t0 = detail::get_f64(is);
  g.t1 = detail::get_f64(is);
  g.lo.assign(g.n, 0.0);
  g.hi.assign(g.n, 0.0);
  for (int a = 0; a < g.n; ++a) {
    g.lo[a] = detail::get_f64(is);
    g.hi[a] = detail::get_f64(is);
  }
  try {
    g.validate();
  } catch (const NumericalError& e) {
    throw ParseError(std::string("HLAB grid block is invalid: ") + e.what());
  }
  const std::size_t count = (static_cast<std::size_t>(g.steps) + 1) * g.node_count();
  out.values.resize(count);
  for (auto& v : out.values) v = detail::get_f64(is);
  return out;
}

inline void save_binary(const std::string& path, const Solution& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_binary(os, s);
}

inline void save_csv(const std::string& path, const Solution& s, int stride = 1) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_csv(os, s, stride);
}

}  // namespace hlab
