#include "options.hpp"

#include <fstream>

#include "poolnet/errors.hpp"

namespace poolnet::cli {

void KeyedOptions::add(const std::string& key, const std::string& help) {
  keys_.insert(key);
  app_->add_option("--" + key, values_[key], help);
}

Config KeyedOptions::resolve() const {
  Config cfg;
  if (!config_path_.empty()) {
    cfg = Config::load(config_path_);
    cfg.require_known(keys_);
  }
  for (const auto& key : keys_) {
    if (app_->count("--" + key) > 0) cfg.set(key, values_.at(key));
  }
  return cfg;
}

OrthoMode parse_mode(const std::string& name) {
  if (name == "haar") return OrthoMode::Haar;
  if (name == "standard") return OrthoMode::StandardBasis;
  throw ParameterError("mode must be haar or standard, got '" + name + "'");
}

std::filesystem::path ensure_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace poolnet::cli
