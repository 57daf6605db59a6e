#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mlenv {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

/// Integers render without a decimal point, everything else via format_double.
std::string format_number(double v);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

/// "a, b, c" from a list of names, for error messages.
std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace mlenv
