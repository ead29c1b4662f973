#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ecgemo::text {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Strict parse of a whole field. Throws DataError on trailing junk.
double parse_double(std::string_view field);
long long parse_int(std::string_view field);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// 0.9251 -> "92.51%", 0.983 -> "98.3%" (two decimals, trailing zeros dropped).
std::string format_percent(double rate);

}  // namespace ecgemo::text
