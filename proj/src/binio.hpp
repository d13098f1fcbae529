#pragma once

// Little-endian stream helpers shared by the vecs loaders and the index file.

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

namespace dvs::binio {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v & 0xffffffffu));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

inline void put_i32(std::ostream& out, std::int32_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
}

inline void put_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

// Readers return false on EOF-before-first-byte; a short read mid-value is
// reported the same way, callers distinguish via tellg bookkeeping.
inline bool get_u32(std::istream& in, std::uint32_t& v) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) return false;
  v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
      (static_cast<std::uint32_t>(b[2]) << 16) |
      (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

inline bool get_u64(std::istream& in, std::uint64_t& v) {
  std::uint32_t lo = 0, hi = 0;
  if (!get_u32(in, lo) || !get_u32(in, hi)) return false;
  v = static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
  return true;
}

inline bool get_i32(std::istream& in, std::int32_t& v) {
  std::uint32_t u = 0;
  if (!get_u32(in, u)) return false;
  v = static_cast<std::int32_t>(u);
  return true;
}

inline bool get_f32(std::istream& in, float& v) {
  std::uint32_t bits = 0;
  if (!get_u32(in, bits)) return false;
  std::memcpy(&v, &bits, 4);
  return true;
}

}  // namespace dvs::binio
