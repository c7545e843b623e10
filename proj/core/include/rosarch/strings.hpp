#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rosarch::str {

// Strip leading/trailing ASCII whitespace.
std::string trim(std::string_view s);

// Trim and collapse internal whitespace runs to a single space.
std::string collapse_ws(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

bool starts_with(std::string_view s, std::string_view prefix);

// Minimal glob: '*' matches any run (including '/'), '?' one char.
bool glob_match(std::string_view pattern, std::string_view text);

// FNV-1a 64-bit, used for stable content hashes in traceability headers.
std::uint64_t fnv1a(std::string_view data);
std::string fnv1a_hex(std::string_view data);

// Digit-aware ordering so that p2 < p10. Falls back to byte order.
int natural_compare(std::string_view a, std::string_view b);

}  // namespace rosarch::str
