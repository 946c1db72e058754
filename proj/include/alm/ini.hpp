#pragma once

// Thin layer over boost::property_tree's INI reader: comment stripping and
// typed lookups with readable error messages.

#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace alm::ini {

using Tree = boost::property_tree::ptree;

std::string slurp(const std::filesystem::path& path);

// Parses INI text. `#` and `;` start comments anywhere on a line.
Tree parse(const std::string& text);

const Tree& section(const Tree& root, const std::string& name);

double get_double(const Tree& sec, const std::string& key);
double get_double(const Tree& sec, const std::string& key, double fallback);

// Whitespace- or comma-separated list. Missing key gives an empty list.
std::vector<double> get_doubles(const Tree& sec, const std::string& key);

std::optional<std::string> get_string(const Tree& sec, const std::string& key);

}  // namespace alm::ini
