#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bioquake/core.hpp"

namespace bioquake {

/// Input that could not be parsed. `row` is 1-based over data rows (0 when
/// the problem is not tied to a row); `field` names the offending column.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t row = 0, std::string field = {})
      : std::runtime_error(std::move(message)), row_(row), field_(std::move(field)) {}

  [[nodiscard]] std::size_t row() const { return row_; }
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::size_t row_;
  std::string field_;
};

struct CsvRow {
  std::size_t line = 0;  // 1-based physical line of the row start
  std::vector<std::string> cells;
};

/// RFC 4180 style: quoted fields with doubled quotes, CRLF or LF. Blank lines
/// and lines starting with '#' are skipped.
std::vector<CsvRow> read_csv(std::string_view text);

std::string csv_escape(std::string_view cell);

/// Strict count: digits with an optional fractional part and a K/M/B suffix
/// (case-insensitive), e.g. "45.8K" -> 45800. The scaled value must be an
/// integer; nothing else is accepted.
Count parse_count(std::string_view text);

/// Strict decimal or scientific real; the whole string must be consumed.
double parse_real(std::string_view text);

/// Full round-trip precision ("%.17g" equivalent, shortest form).
std::string format_real(double value);

}  // namespace bioquake
