#pragma once

// Little-endian primitive encoding shared by the matrix and model formats.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "xling/error.hpp"

namespace xling::detail {

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_arithmetic_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(bytes.data(), sizeof(T));
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

// Reader that raises `code` on a short read.
class LeReader {
 public:
  LeReader(std::istream& in, ErrorCode code) : in_(in), code_(code) {}

  template <typename T>
  T read(const char* what) {
    std::array<char, sizeof(T)> bytes;
    if (!in_.read(bytes.data(), sizeof(T))) fail(what);
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(bytes.begin(), bytes.end());
    }
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
  }

  std::string read_string(const char* what, std::uint32_t max_len = 1u << 24) {
    const auto len = read<std::uint32_t>(what);
    if (len > max_len) fail(what);
    std::string s(len, '\0');
    if (len > 0 && !in_.read(s.data(), len)) fail(what);
    return s;
  }

  void read_bytes(char* dst, std::size_t n, const char* what) {
    if (!in_.read(dst, static_cast<std::streamsize>(n))) fail(what);
  }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

  [[noreturn]] void fail(const char* what) {
    throw Error(code_, std::string("truncated or corrupt data while reading ") + what);
  }

 private:
  std::istream& in_;
  ErrorCode code_;
};

}  // namespace xling::detail
