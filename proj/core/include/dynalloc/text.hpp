#pragma once

// Locale-independent number formatting and parsing for the text formats.

#include <string>
#include <string_view>
#include <vector>

namespace dynalloc {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// Parses the whole of `text` as a double. Throws InvalidInput naming `what`.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
/// Splits on runs of blanks and tabs.
std::vector<std::string_view> tokens(std::string_view s);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace dynalloc
