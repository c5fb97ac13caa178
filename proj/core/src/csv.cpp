#include "tripurpose/csv.hpp"

#include <charconv>

#include "tripurpose/error.hpp"

namespace tripurpose::csv {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_field(std::string_view field, std::string_view what, std::size_t line_no) {
  fail(ErrorKind::CorruptInput, "line " + std::to_string(line_no) + ": bad " + std::string(what) +
                                    " '" + std::string(field) + "'");
}

}  // namespace

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    std::size_t end = line.find(delim, begin);
    if (end == std::string_view::npos) {
      fields.push_back(trim(line.substr(begin)));
      return fields;
    }
    fields.push_back(trim(line.substr(begin, end - begin)));
    begin = end + 1;
  }
}

double parse_double(std::string_view field, std::string_view what, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) bad_field(field, what, line_no);
  return v;
}

std::int64_t parse_int(std::string_view field, std::string_view what, std::size_t line_no) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) bad_field(field, what, line_no);
  return v;
}

std::optional<double> try_double(std::string_view field) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) return std::nullopt;
  return v;
}

std::optional<std::int64_t> try_int(std::string_view field) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) fail(ErrorKind::Io, "number formatting failed");
  return std::string(buf, ptr);
}

LineReader::LineReader(std::string path) : path_(std::move(path)), in_(path_) {
  if (!in_) fail(ErrorKind::Io, "cannot open " + path_);
}

bool LineReader::next(std::string& line) {
  if (!std::getline(in_, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  ++line_no_;
  return true;
}

}  // namespace tripurpose::csv
