#pragma once

// Little-endian primitives for the GDPN checkpoint and GDEB dataset formats.
// Byte order is fixed regardless of host endianness.

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "gdpnet/errors.hpp"

namespace gdpnet::binary {

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(std::string_view b) { out_.write(b.data(), static_cast<std::streamsize>(b.size())); }
  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) { put_le<4>(v); }
  void u64(std::uint64_t v) { put_le<8>(v); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  // u32 byte length followed by the raw UTF-8 bytes.
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }

 private:
  template <int N>
  void put_le(std::uint64_t v) {
    std::array<char, N> buf{};
    for (int i = 0; i < N; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    out_.write(buf.data(), N);
  }

  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint64_t offset() const noexcept { return offset_; }

  std::string bytes(std::size_t n, const char* what) {
    std::string s(n, '\0');
    read_into(s.data(), n, what);
    return s;
  }
  std::uint8_t u8(const char* what) {
    char c{};
    read_into(&c, 1, what);
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(get_le<4>(what)); }
  std::uint64_t u64(const char* what) { return get_le<8>(what); }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::string str(const char* what, std::uint32_t max_len = 1u << 24) {
    const auto at = offset_;
    const auto n = u32(what);
    if (n > max_len) throw ParseError(std::string("implausible length for ") + what, at);
    return bytes(n, what);
  }

  bool at_eof() {
    return in_.peek() == std::char_traits<char>::eof();
  }

 private:
  void read_into(char* dst, std::size_t n, const char* what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw ParseError(std::string("truncated record while reading ") + what, offset_);
    }
    offset_ += n;
  }

  template <int N>
  std::uint64_t get_le(const char* what) {
    std::array<char, N> buf{};
    read_into(buf.data(), N, what);
    std::uint64_t v = 0;
    for (int i = 0; i < N; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return v;
  }

  std::istream& in_;
  std::uint64_t offset_ = 0;
};

}  // namespace gdpnet::binary
