#pragma once

// Little-endian primitives for the versioned model files. Byte order is
// packed explicitly so the files are portable across hosts.

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "topoproj/types.hpp"

namespace topoproj::detail {

inline void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline void write_i64(std::ostream& out, std::int64_t v) {
  write_u64(out, static_cast<std::uint64_t>(v));
}

inline void write_f64(std::ostream& out, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, 8);
  write_u64(out, bits);
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
  write_i64(out, m.rows());
  write_i64(out, m.cols());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) write_f64(out, m(r, c));
}

inline std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("truncated file while reading u32");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("truncated file while reading u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline std::int64_t read_i64(std::istream& in) { return static_cast<std::int64_t>(read_u64(in)); }

inline double read_f64(std::istream& in) {
  const std::uint64_t bits = read_u64(in);
  double v = 0;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline std::string read_string(std::istream& in) {
  const std::uint64_t n = read_u64(in);
  if (n > (1ull << 32)) throw std::runtime_error("implausible string length in file");
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("truncated file while reading string");
  return s;
}

inline Matrix read_matrix(std::istream& in) {
  const std::int64_t rows = read_i64(in);
  const std::int64_t cols = read_i64(in);
  constexpr std::int64_t kMaxSide = std::int64_t{1} << 31;
  if (rows < 0 || cols < 0 || rows >= kMaxSide || cols >= kMaxSide || rows * cols >= kMaxSide)
    throw std::runtime_error("implausible matrix shape in file");
  Matrix m(rows, cols);
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = read_f64(in);
  return m;
}

inline void expect_magic(std::istream& in, const char (&magic)[5], const std::string& what) {
  char buf[4];
  in.read(buf, 4);
  if (!in || std::memcmp(buf, magic, 4) != 0)
    throw std::runtime_error("not a " + what + " file (bad magic)");
}

}  // namespace topoproj::detail
