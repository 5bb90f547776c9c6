#include "poolnet/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "poolnet/errors.hpp"

namespace poolnet {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

long parse_long(const std::string& key, const std::string& text) {
  long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParameterError("config: " + key + " expects an integer, got '" + text + "'");
  }
  return v;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParameterError("config: " + key + " expects a number, got '" + text + "'");
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma == std::string::npos ? std::string::npos
                                                                          : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw FormatError(source + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw FormatError(source + ":" + std::to_string(number) + ": empty key");
    c.values_[key] = trim(t.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("config: cannot open " + path.string());
  return parse(in, path.string());
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

void Config::merge(const Config& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::optional<std::string> Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

long Config::get_int(const std::string& key, long fallback) const {
  const auto v = get(key);
  return v ? parse_long(key, *v) : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? parse_double(key, *v) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
  if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
  throw ParameterError("config: " + key + " expects a boolean, got '" + *v + "'");
}

std::vector<long> Config::get_int_list(const std::string& key,
                                       const std::vector<long>& fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  std::vector<long> out;
  for (const auto& piece : split_list(*v)) out.push_back(parse_long(key, piece));
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::vector<double>& fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& piece : split_list(*v)) out.push_back(parse_double(key, piece));
  return out;
}

std::vector<std::string> Config::get_string_list(const std::string& key,
                                                 const std::vector<std::string>& fallback) const {
  const auto v = get(key);
  return v ? split_list(*v) : fallback;
}

void Config::require_known(const std::set<std::string>& known) const {
  for (const auto& [k, v] : values_) {
    if (known.count(k) == 0) throw ParameterError("config: unknown key '" + k + "'");
  }
}

void Config::write(std::ostream& out) const {
  for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
}

}  // namespace poolnet
