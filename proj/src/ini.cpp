#include "alm/ini.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <fstream>
#include <sstream>

#include "alm/csv.hpp"
#include "alm/error.hpp"

namespace alm::ini {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Tree parse(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream cleaned;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    cleaned << line << '\n';
  }
  Tree tree;
  std::istringstream src(cleaned.str());
  try {
    boost::property_tree::ini_parser::read_ini(src, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("ini: ") + e.what());
  }
  return tree;
}

const Tree& section(const Tree& root, const std::string& name) {
  const auto child = root.get_child_optional(name);
  if (!child) throw ConfigError("missing section [" + name + "]");
  return *child;
}

double get_double(const Tree& sec, const std::string& key) {
  const auto value = sec.get_optional<std::string>(key);
  if (!value) throw ConfigError("missing key '" + key + "'");
  try {
    return csv::parse_double(*value);
  } catch (const ConfigError&) {
    throw ConfigError("key '" + key + "': not a number: '" + *value + "'");
  }
}

double get_double(const Tree& sec, const std::string& key, double fallback) {
  if (!sec.get_optional<std::string>(key)) return fallback;
  return get_double(sec, key);
}

std::vector<double> get_doubles(const Tree& sec, const std::string& key) {
  std::vector<double> out;
  const auto value = sec.get_optional<std::string>(key);
  if (!value) return out;
  std::string text = *value;
  for (auto& ch : text) {
    if (ch == ',' || ch == '\t') ch = ' ';
  }
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    try {
      out.push_back(csv::parse_double(tok));
    } catch (const ConfigError&) {
      throw ConfigError("key '" + key + "': not a number: '" + tok + "'");
    }
  }
  return out;
}

std::optional<std::string> get_string(const Tree& sec, const std::string& key) {
  auto v = sec.get_optional<std::string>(key);
  if (!v) return std::nullopt;
  return *v;
}

}  // namespace alm::ini
