#include "text_util.hpp"

#include <charconv>

#include "dcube/error.hpp"

namespace dcube::text {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<Line> logical_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0, pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++number;
    auto raw = text.substr(pos, nl - pos);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (!raw.empty()) out.push_back({number, raw});
    pos = nl + 1;
  }
  return out;
}

std::pair<std::string_view, std::string_view> split_assignment(const Line& line) {
  auto eq = line.text.find('=');
  if (eq == std::string_view::npos)
    throw ParseError(line.number, "expected 'key = value', got '" + std::string(line.text) + "'");
  return {trim(line.text.substr(0, eq)), trim(line.text.substr(eq + 1))};
}

std::int64_t parse_int(std::string_view s, std::size_t line) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ParseError(line, "invalid integer '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_uint(std::string_view s, std::size_t line) {
  s = trim(s);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ParseError(line, "invalid non-negative integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::int64_t> parse_csv_ints(std::string_view s, std::size_t line) {
  std::vector<std::int64_t> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    auto comma = s.find(',', pos);
    out.push_back(parse_int(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos),
                            line));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<std::string_view> parse_bracket_items(std::string_view s, std::size_t line) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw ParseError(line, "expected a bracketed list");
  s = trim(s.substr(1, s.size() - 2));
  std::vector<std::string_view> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    auto comma = s.find(',', pos);
    auto item = trim(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos));
    if (item.empty()) throw ParseError(line, "empty list item");
    out.push_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<std::vector<std::int64_t>> parse_int_matrix(std::string_view s, std::size_t line) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw ParseError(line, "expected a bracketed matrix");
  s = trim(s.substr(1, s.size() - 2));
  std::vector<std::vector<std::int64_t>> rows;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto open = s.find('[', pos);
    if (open == std::string_view::npos) throw ParseError(line, "expected '[' starting a row");
    if (!trim(s.substr(pos, open - pos)).empty() && trim(s.substr(pos, open - pos)) != ",")
      throw ParseError(line, "unexpected text between matrix rows");
    auto close = s.find(']', open);
    if (close == std::string_view::npos) throw ParseError(line, "unterminated matrix row");
    std::vector<std::int64_t> row;
    for (auto item : parse_bracket_items(s.substr(open, close - open + 1), line))
      row.push_back(parse_int(item, line));
    rows.push_back(std::move(row));
    pos = close + 1;
  }
  return rows;
}

std::map<std::string, std::string> parse_header(const Line& line, std::string_view tag) {
  std::map<std::string, std::string> fields;
  std::string_view s = line.text;
  auto sp = s.find_first_of(" \t");
  if (s.substr(0, sp) != tag)
    throw ParseError(line.number, "expected header '" + std::string(tag) + "'");
  if (sp == std::string_view::npos) return fields;
  s = trim(s.substr(sp));
  while (!s.empty()) {
    auto end = s.find_first_of(" \t");
    auto tok = s.substr(0, end);
    auto eq = tok.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw ParseError(line.number, "malformed header field '" + std::string(tok) + "'");
    auto [it, inserted] =
        fields.emplace(std::string(tok.substr(0, eq)), std::string(tok.substr(eq + 1)));
    if (!inserted) throw ParseError(line.number, "duplicate header field '" + it->first + "'");
    s = end == std::string_view::npos ? std::string_view{} : trim(s.substr(end));
  }
  return fields;
}

std::string join_ints(const std::vector<std::int64_t>& v, std::string_view sep) {
  return join(v.begin(), v.end(), sep);
}

}  // namespace dcube::text
