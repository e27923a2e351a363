#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace chronoweave {

// Trims and collapses every whitespace run to a single space.
std::string collapse_whitespace(std::string_view s);

// Replaces C0/C1 control characters (and DEL) with spaces.
std::string strip_control_chars(std::string_view s);

std::string to_lower_ascii(std::string_view s);

// Number of Unicode scalar values; bytes of invalid UTF-8 count one each.
std::size_t utf8_length(std::string_view s);

std::vector<std::string> whitespace_words(std::string_view s);

// First n whitespace-delimited words joined by single spaces.
std::string first_words(std::string_view s, std::size_t n);

// Lowercased, whitespace-collapsed key used for title deduplication.
std::string casefold_key(std::string_view s);

std::string replace_all(std::string s, std::string_view from, std::string_view to);

bool starts_with(std::string_view s, std::string_view prefix);

std::string trim(std::string_view s);

std::vector<std::string_view> split_lines(std::string_view s);

}  // namespace chronoweave
