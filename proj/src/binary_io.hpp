#pragma once

// Little-endian primitive encoding for index snapshots.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "coax/error.hpp"

namespace coax::detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 4);
}

inline void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

inline void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw Error(ErrorCode::Parse, "truncated snapshot");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
  return v;
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) throw Error(ErrorCode::Parse, "truncated snapshot");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{buf[i]} << (8 * i);
  return v;
}

inline std::uint8_t get_u8(std::istream& in) {
  char c;
  if (!in.get(c)) throw Error(ErrorCode::Parse, "truncated snapshot");
  return static_cast<std::uint8_t>(c);
}

inline double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

// Upper bound on element counts read from a snapshot before allocating.
inline std::uint64_t get_count(std::istream& in, std::uint64_t limit) {
  const std::uint64_t n = get_u64(in);
  if (n > limit) throw Error(ErrorCode::Parse, "snapshot count out of range");
  return n;
}

}  // namespace coax::detail
