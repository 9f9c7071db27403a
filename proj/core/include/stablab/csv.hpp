#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

namespace stablab::csv {

/// Shortest round-trip decimal form of a double ('.' separator, no locale).
inline void append(std::string& out, double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) {
    out += "nan";
    return;
  }
  out.append(buf.data(), ptr);
}

inline void append(std::string& out, std::uint64_t v) {
  std::array<char, 24> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  out.append(buf.data(), ptr);
}

inline std::string to_string(double v) {
  std::string s;
  append(s, v);
  return s;
}

}  // namespace stablab::csv
