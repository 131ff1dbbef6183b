#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rcgrf {

/// Shortest decimal form that round-trips the exact double.
std::string format_double(double value);

/// Fixed-point with `decimals` fractional digits.
std::string format_fixed(double value, int decimals);

/// Strict full-string parse; rejects trailing junk and non-finite text.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);

}  // namespace rcgrf
