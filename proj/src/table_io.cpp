#include "bioquake/table_io.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace bioquake {

std::vector<CsvRow> read_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t line = 1;
  std::size_t i = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;  // UTF-8 BOM

  while (i < text.size()) {
    // Skip blank and comment lines.
    if (text[i] == '\n' || text[i] == '\r') {
      if (text[i] == '\n') ++line;
      ++i;
      continue;
    }
    if (text[i] == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }

    CsvRow row;
    row.line = line;
    std::string cell;
    bool in_quotes = false;
    bool done = false;
    while (!done) {
      if (i >= text.size()) {
        if (in_quotes) throw ParseError(fmt::format("unterminated quoted field at line {}", row.line));
        row.cells.push_back(std::move(cell));
        break;
      }
      const char c = text[i++];
      if (in_quotes) {
        if (c == '"') {
          if (i < text.size() && text[i] == '"') {
            cell += '"';
            ++i;
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line;
          cell += c;
        }
        continue;
      }
      switch (c) {
        case '"':
          in_quotes = true;
          break;
        case ',':
          row.cells.push_back(std::move(cell));
          cell.clear();
          break;
        case '\r':
          break;
        case '\n':
          ++line;
          row.cells.push_back(std::move(cell));
          done = true;
          break;
        default:
          cell += c;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_escape(std::string_view cell) {
  if (cell.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (const char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Count parse_count(std::string_view text) {
  if (text.empty()) throw ParseError("empty count");
  Count scale = 1;
  switch (text.back()) {
    case 'K':
    case 'k':
      scale = 1'000;
      break;
    case 'M':
    case 'm':
      scale = 1'000'000;
      break;
    case 'B':
    case 'b':
      scale = 1'000'000'000;
      break;
    default:
      break;
  }
  std::string_view digits = scale == 1 ? text : text.substr(0, text.size() - 1);
  const auto dot = digits.find('.');
  const std::string_view whole = digits.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : digits.substr(dot + 1);
  const auto all_digits = [](std::string_view s) {
    return s.find_first_not_of("0123456789") == std::string_view::npos;
  };
  if (whole.empty() || !all_digits(whole) || !all_digits(frac) ||
      (dot != std::string_view::npos && frac.empty())) {
    throw ParseError(fmt::format("'{}' is not a count", text));
  }

  Count value = 0;
  const auto parse_int = [&](std::string_view s) {
    Count v = 0;
    if (s.empty()) return v;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ParseError(fmt::format("'{}' is not a count", text));
    }
    return v;
  };
  value = parse_int(whole);
  if (value > std::numeric_limits<Count>::max() / scale) {
    throw ParseError(fmt::format("count '{}' overflows", text));
  }
  value *= scale;

  // Fractional digits must resolve to whole units after scaling.
  Count unit = scale;
  for (const char c : frac) {
    if (unit % 10 != 0) {
      if (c != '0') throw ParseError(fmt::format("'{}' is not a whole count", text));
      continue;
    }
    unit /= 10;
    value += static_cast<Count>(c - '0') * unit;
  }
  return value;
}

double parse_real(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    throw ParseError(fmt::format("'{}' is not a number", text));
  }
  return value;
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace bioquake
