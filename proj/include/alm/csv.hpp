#pragma once

// Minimal CSV helpers. Fields never contain commas or quotes in any file this
// project reads or writes, so no quoting is supported.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace alm::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column; throws ConfigError when missing.
  std::size_t column(std::string_view name) const;
};

Table read(const std::filesystem::path& path);

std::vector<std::string> split(std::string_view line, char sep = ',');

// Shortest representation that parses back to the identical double.
std::string format_double(double x);

// Strict parse of a whole field; throws ConfigError on junk.
double parse_double(std::string_view field);

}  // namespace alm::csv
