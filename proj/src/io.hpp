#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace aml::io {

std::string read_file(const std::filesystem::path &path);

// Write-temp-then-rename so readers never observe a partial file.
void atomic_write_file(const std::filesystem::path &path, std::string_view content);

// Split one CSV line on commas. No quoting: the formats here never need it.
std::vector<std::string> split_csv_line(std::string_view line);

// Content lines of a CSV file: strips trailing '\r', drops blank lines and
// lines starting with '#'.
std::vector<std::string> csv_lines(const std::string &content);

double parse_double(std::string_view field, const std::string &context);
int64_t parse_int(std::string_view field, const std::string &context);

}  // namespace aml::io
