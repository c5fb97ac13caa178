#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tripurpose::csv {

// Splits one CSV line on the delimiter. Fields are trimmed of surrounding
// spaces; quoting is not supported (none of our formats need it).
std::vector<std::string_view> split_fields(std::string_view line, char delim = ',');

// Strict numeric parsing; the whole field must be consumed. `what` and
// `line_no` feed the error message.
double parse_double(std::string_view field, std::string_view what, std::size_t line_no);
std::int64_t parse_int(std::string_view field, std::string_view what, std::size_t line_no);

// Non-throwing variants for row-skipping loaders.
std::optional<double> try_double(std::string_view field);
std::optional<std::int64_t> try_int(std::string_view field);

// Shortest round-trip decimal form, locale-independent.
std::string format_double(double v);

// Line iterator that strips trailing \r and counts lines for error messages.
class LineReader {
 public:
  explicit LineReader(std::string path);

  bool next(std::string& line);
  std::size_t line_number() const { return line_no_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

}  // namespace tripurpose::csv
