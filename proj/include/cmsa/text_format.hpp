#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cmsa {

// Shortest decimal form that parses back to the same double.
std::string format_shortest(double v);

// %.17g equivalent, locale independent.
std::string format_g17(double v);

// Strict full-field parse; throws FormatError(line, ...) on junk.
double parse_double(std::string_view field, std::size_t line);
long long parse_int(std::string_view field, std::size_t line);
unsigned long long parse_uint(std::string_view field, std::size_t line);

// Splits on runs of ASCII whitespace, dropping empty fields.
std::vector<std::string_view> split_ws(std::string_view s);

// Splits on a single separator, keeping empty fields.
std::vector<std::string_view> split_on(std::string_view s, char sep);

std::string_view trim_ws(std::string_view s);

}  // namespace cmsa
