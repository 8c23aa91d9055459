#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mrm {

// Every float the tool writes goes through these: 12 significant digits.
inline constexpr int kSignificantDigits = 12;

std::string format_double(double x);

// x rounded to 12 significant digits (NaN and infinities pass through).
double round_sig(double x);

// Strict full-string parse; throws ArgumentError.
double parse_double(std::string_view s);

// "a,b,c" -> {a, b, c}
std::vector<double> parse_double_list(std::string_view s);

}  // namespace mrm
