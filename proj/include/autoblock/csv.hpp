#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace autoblock::csv {

/// RFC 4180 reader: quoted fields may hold delimiters, doubled quotes and
/// newlines. Tracks the 1-based physical line where each record starts.
class Reader {
 public:
  Reader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

  /// Returns false at end of input. Throws autoblock::Error on an
  /// unterminated quoted field.
  bool next(std::vector<std::string>& fields);

  std::size_t record_line() const { return record_line_; }

 private:
  std::istream& in_;
  char delimiter_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

std::string escape(std::string_view field, char delimiter = ',');

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter = ',');

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace autoblock::csv
