#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace puw {

using Digest = std::array<std::uint8_t, 32>;

inline void put_u64_be(std::uint8_t* p, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) {
    p[i] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
}

inline std::uint64_t get_u64_be(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  return v;
}

inline void put_u32_be(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 24);
  p[1] = static_cast<std::uint8_t>(v >> 16);
  p[2] = static_cast<std::uint8_t>(v >> 8);
  p[3] = static_cast<std::uint8_t>(v);
}

inline std::uint32_t get_u32_be(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

// Append-only byte builder for canonical serializations.
class ByteWriter {
 public:
  void u64be(std::uint64_t v) {
    std::uint8_t tmp[8];
    put_u64_be(tmp, v);
    buf_.insert(buf_.end(), tmp, tmp + 8);
  }
  void u32be(std::uint32_t v) {
    std::uint8_t tmp[4];
    put_u32_be(tmp, v);
    buf_.insert(buf_.end(), tmp, tmp + 4);
  }
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void bytes(const std::uint8_t* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  void bytes(const Digest& d) { bytes(d.data(), d.size()); }
  const std::vector<std::uint8_t>& data() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

std::string to_hex(const std::uint8_t* p, std::size_t n);
inline std::string to_hex(const Digest& d) { return to_hex(d.data(), d.size()); }
inline std::string to_hex(const std::vector<std::uint8_t>& v) { return to_hex(v.data(), v.size()); }

std::vector<std::uint8_t> from_hex(const std::string& s);  // throws std::invalid_argument
Digest digest_from_hex(const std::string& s);

// Lexicographic (big-endian numeric) comparison; <0, 0, >0 like memcmp.
inline int compare_digests(const Digest& a, const Digest& b) {
  return std::memcmp(a.data(), b.data(), a.size());
}

}  // namespace puw
