#include "nxbench/text.hpp"

#include <array>
#include <charconv>

#include "nxbench/error.hpp"

namespace nxbench {

std::string format_shortest(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string format_fixed(double value, int digits) {
  std::array<char, 128> buf{};
  auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, digits);
  if (ec != std::errc{}) return format_shortest(value);
  return std::string(buf.data(), ptr);
}

std::string format_hex(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::hex);
  return std::string(buf.data(), ptr);
}

double parse_hex_double(const std::string& text) {
  double value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  bool negative = false;
  if (begin != end && *begin == '-') {
    negative = true;
    ++begin;
  }
  auto [ptr, ec] = std::from_chars(begin, end, value, std::chars_format::hex);
  if (ec != std::errc{} || ptr != end) throw LoadError("malformed number '" + text + "'");
  return negative ? -value : value;
}

}  // namespace nxbench
