#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace crevtax::text {

/// ASCII lower-casing; bytes >= 0x80 pass through untouched.
std::string to_lower(std::string_view s);

std::string_view trim(std::string_view s);

/// Strips leading/trailing whitespace and ASCII punctuation (quotes, asterisks, periods...).
std::string_view trim_wrapping(std::string_view s);

/// Replaces every run of whitespace with a single space.
std::string collapse_whitespace(std::string_view s);

/// Lowercased, whitespace-collapsed, trimmed form used for name comparisons.
std::string normalize_name(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

/// Largest index <= pos that does not fall inside a UTF-8 multi-byte sequence.
std::size_t utf8_floor(std::string_view s, std::size_t pos);

/// True when [begin, end) in `haystack` is bounded by non-alphanumeric bytes or the string ends.
bool is_word_boundary(std::string_view haystack, std::size_t begin, std::size_t end);

void warn(std::string_view message);

/// Silences warn() output (tests use this to keep logs quiet).
void set_warnings_enabled(bool enabled);

}  // namespace crevtax::text
