#include "autoblock/csv.hpp"

#include <charconv>

#include "autoblock/error.hpp"

namespace autoblock::csv {

bool Reader::next(std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  if (!std::getline(in_, line)) return false;
  ++line_;
  record_line_ = line_;

  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (;;) {
    if (!line.empty() && line.back() == '\r' && !quoted) line.pop_back();
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == '"' && !field_started) {
        quoted = true;
        field_started = true;
      } else if (c == delimiter_) {
        fields.push_back(std::move(field));
        field.clear();
        field_started = false;
      } else {
        field.push_back(c);
        field_started = true;
      }
    }
    if (!quoted) break;
    field.push_back('\n');
    if (!std::getline(in_, line)) {
      throw Error("unterminated quoted field in record starting at line " +
                  std::to_string(record_line_));
    }
    ++line_;
  }
  fields.push_back(std::move(field));
  return true;
}

std::string escape(std::string_view field, char delimiter) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == delimiter || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(delimiter);
    out << escape(fields[i], delimiter);
  }
  out.put('\n');
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace autoblock::csv
