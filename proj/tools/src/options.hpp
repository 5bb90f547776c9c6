#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "poolnet/config.hpp"
#include "poolnet/patterns.hpp"

namespace poolnet::cli {

enum ExitCode { kOk = 0, kUsage = 1, kRuntime = 2, kCheckFailed = 3 };

/// Thrown by a command whose own checks failed; maps to exit code 3.
class CheckFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// String-valued flags that double as config-file keys. Values given on the
/// command line override the file named by --config.
class KeyedOptions {
 public:
  explicit KeyedOptions(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "key = value file; flags override it")
        ->check(CLI::ExistingFile);
  }

  void add(const std::string& key, const std::string& help);
  const std::set<std::string>& keys() const { return keys_; }

  /// File entries (checked against the registered keys) with flags on top.
  Config resolve() const;

 private:
  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, std::string> values_;
  std::set<std::string> keys_;
};

OrthoMode parse_mode(const std::string& name);

/// Creates the directory (and parents) and returns it.
std::filesystem::path ensure_dir(const std::string& dir);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace poolnet::cli
