#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dcube::text {

struct Line {
  std::size_t number;
  std::string_view text;
};

// Non-blank lines with `#` comments and surrounding whitespace removed.
std::vector<Line> logical_lines(std::string_view text);

std::string_view trim(std::string_view s);

// Splits "key = value"; throws ParseError on a missing '='.
std::pair<std::string_view, std::string_view> split_assignment(const Line& line);

std::int64_t parse_int(std::string_view s, std::size_t line);
std::uint64_t parse_uint(std::string_view s, std::size_t line);

// "a,b,c" (whitespace tolerated).
std::vector<std::int64_t> parse_csv_ints(std::string_view s, std::size_t line);

// "[a, b, c]" where each item is returned as trimmed text.
std::vector<std::string_view> parse_bracket_items(std::string_view s, std::size_t line);

// "[[..],[..]]" integer rows.
std::vector<std::vector<std::int64_t>> parse_int_matrix(std::string_view s, std::size_t line);

// A header "<tag> key=value key=value"; returns the fields, checking the tag.
std::map<std::string, std::string> parse_header(const Line& line, std::string_view tag);

std::string join_ints(const std::vector<std::int64_t>& v, std::string_view sep = ",");

template <typename It>
std::string join(It begin, It end, std::string_view sep = ",") {
  std::string out;
  for (It it = begin; it != end; ++it) {
    if (it != begin) out += sep;
    out += std::to_string(*it);
  }
  return out;
}

}  // namespace dcube::text
