#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "autoblock/error.hpp"

namespace autoblock::binary {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&value, bytes, sizeof(T));
  }
  return value;
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t size) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) {
    v = to_little(v);
    bytes(&v, 4);
  }
  void u64(std::uint64_t v) {
    v = to_little(v);
    bytes(&v, 8);
  }
  void f32(double v) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    u32(bits);
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  void bytes(void* data, std::size_t size) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (static_cast<std::size_t>(in_.gcount()) != size) throw Error(what_ + ": unexpected end of file");
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, 4);
    return to_little(v);
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, 8);
    return to_little(v);
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str(std::size_t limit = 1u << 24) {
    const std::uint32_t n = u32();
    if (n > limit) throw Error(what_ + ": string length " + std::to_string(n) + " out of range");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  /// Bounds a count read from the file before allocating for it.
  std::uint64_t count(std::uint64_t limit, const char* field) {
    const std::uint64_t n = u64();
    if (n > limit) throw Error(what_ + ": " + field + " " + std::to_string(n) + " out of range");
    return n;
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) throw Error(what_ + ": trailing bytes");
  }

 private:
  std::istream& in_;
  std::string what_;
};

/// Value as it survives a float32 round trip.
inline double round_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

}  // namespace autoblock::binary
