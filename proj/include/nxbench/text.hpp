#pragma once

#include <string>

namespace nxbench {

/// Shortest round-trip decimal form (std::to_chars), locale independent.
std::string format_shortest(double value);

/// Fixed notation with `digits` decimals.
std::string format_fixed(double value, int digits);

/// Hexadecimal float, bit-exact on round trip.
std::string format_hex(double value);
double parse_hex_double(const std::string& text);

}  // namespace nxbench
