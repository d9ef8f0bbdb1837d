#pragma once

#include <string>
#include <string_view>

namespace momentrec {

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

// Strict parse of a full string; throws FormatError on trailing junk.
double parse_double(std::string_view text);

// printf-style "%.*f" / "%g" helpers used by reports.
std::string format_fixed(double value, int decimals);
std::string format_general(double value, int significant = 6);

}  // namespace momentrec
