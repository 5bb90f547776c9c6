#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace poolnet {

/// Flat key=value configuration. Blank lines and lines starting with '#' are
/// ignored; whitespace around keys and values is trimmed. Later assignments
/// override earlier ones, so flags applied after a file take precedence.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  /// Copies every entry of `other` over this one.
  void merge(const Config& other);

  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<long> get_int_list(const std::string& key, const std::vector<long>& fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;
  std::vector<std::string> get_string_list(const std::string& key,
                                           const std::vector<std::string>& fallback) const;

  /// Throws ParameterError naming the first key not in `known`.
  void require_known(const std::set<std::string>& known) const;

  const std::map<std::string, std::string>& entries() const { return values_; }
  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Comma-separated list split with surrounding whitespace removed.
std::vector<std::string> split_list(const std::string& text);

}  // namespace poolnet
