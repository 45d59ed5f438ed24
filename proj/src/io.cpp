#include "io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "error.hpp"

namespace aml::io {

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("I/O error: cannot open '" + path.string() + "' for reading");
  }
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw DataError("I/O error: failed while reading '" + path.string() + "'");
  }
  return content;
}

void atomic_write_file(const std::filesystem::path &path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw DataError("I/O error: cannot open '" + tmp.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw DataError("I/O error: failed while writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw DataError("I/O error: cannot rename '" + tmp.string() + "' to '" + path.string() +
                    "': " + ec.message());
  }
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::vector<std::string> csv_lines(const std::string &content) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start <= content.size()) {
    size_t nl = content.find('\n', start);
    std::string_view line;
    if (nl == std::string::npos) {
      line = std::string_view(content).substr(start);
      start = content.size() + 1;
    } else {
      line = std::string_view(content).substr(start, nl - start);
      start = nl + 1;
    }
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    lines.emplace_back(line);
  }
  return lines;
}

double parse_double(std::string_view field, const std::string &context) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw DataError("parse error: " + context + ": invalid number '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw DataError("parse error: " + context + ": non-finite value '" + std::string(field) + "'");
  }
  return value;
}

int64_t parse_int(std::string_view field, const std::string &context) {
  int64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw DataError("parse error: " + context + ": invalid integer '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace aml::io
