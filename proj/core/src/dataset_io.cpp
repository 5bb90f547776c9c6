#include "poolnet/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "poolnet/errors.hpp"

namespace poolnet {

namespace {

constexpr const char* kMagic = "poolnet-dataset";
constexpr int kVersion = 1;

template <typename T>
T read_field(std::istream& in, const std::string& key) {
  std::string name;
  T value{};
  if (!(in >> name) || name != key || !(in >> value)) {
    throw FormatError("dataset: expected field '" + key + "'");
  }
  return value;
}

void expect_token(std::istream& in, const std::string& token) {
  std::string got;
  if (!(in >> got) || got != token) throw FormatError("dataset: expected '" + token + "'");
}

double read_number(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw FormatError("dataset: truncated numeric data");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw FormatError("dataset: bad number '" + tok + "'");
  }
  if (used != tok.size()) throw FormatError("dataset: bad number '" + tok + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_dataset(std::ostream& out, const Dataset& ds) {
  if (!ds.patterns) throw ParameterError("write_dataset: missing pattern set");
  const auto& ps = *ds.patterns;
  out << kMagic << ' ' << kVersion << '\n';
  out << "d " << ps.dimension() << '\n';
  out << "n " << ds.patch_count << '\n';
  out << "l " << ps.count() << '\n';
  out << "m " << ds.size() << '\n';
  out << "rho " << format_double(ds.noise_radius) << '\n';
  out << "seed " << ds.seed << '\n';
  out << "mode " << (ps.mode() == OrthoMode::StandardBasis ? "standard" : "haar") << '\n';
  out << "patterns\n";
  for (int i = 0; i < ps.count(); ++i) {
    auto row = ps.pattern(i);
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << format_double(row[c]);
    out << '\n';
  }
  out << "samples\n";
  for (const auto& s : ds.samples) {
    out << s.label << ' ' << s.discriminative_slot;
    for (int id : s.slot_pattern_ids) out << ' ' << id;
    if (ds.noise_radius > 0.0) {
      for (double v : s.patches.values()) out << ' ' << format_double(v);
    }
    out << '\n';
  }
}

Dataset read_dataset(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) throw FormatError("dataset: bad header");
  if (version != kVersion) {
    throw FormatError("dataset: unsupported version " + std::to_string(version));
  }
  const int d = read_field<int>(in, "d");
  const int n = read_field<int>(in, "n");
  const int l = read_field<int>(in, "l");
  const long m = read_field<long>(in, "m");
  std::string key;
  if (!(in >> key) || key != "rho") throw FormatError("dataset: expected field 'rho'");
  const double rho = read_number(in);
  const auto seed = read_field<std::uint64_t>(in, "seed");
  const auto mode_name = read_field<std::string>(in, "mode");
  if (d < 1 || n < 1 || l < 3 || l > d || m < 0 || !(rho >= 0.0)) {
    throw FormatError("dataset: header values out of range");
  }
  OrthoMode mode = OrthoMode::Haar;
  if (mode_name == "standard") {
    mode = OrthoMode::StandardBasis;
  } else if (mode_name != "haar") {
    throw FormatError("dataset: unknown pattern mode '" + mode_name + "'");
  }

  expect_token(in, "patterns");
  Matrix pm(static_cast<std::size_t>(l), static_cast<std::size_t>(d));
  for (double& v : pm.values()) v = read_number(in);
  Dataset ds;
  try {
    ds.patterns = std::make_shared<const PatternSet>(std::move(pm), mode);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("dataset: invalid patterns: ") + e.what());
  }
  ds.patch_count = n;
  ds.noise_radius = rho;
  ds.seed = seed;

  expect_token(in, "samples");
  const auto& ps = *ds.patterns;
  ds.samples.reserve(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i) {
    LabeledSample s;
    if (!(in >> s.label >> s.discriminative_slot)) throw FormatError("dataset: truncated samples");
    if (s.label != 1 && s.label != -1) throw FormatError("dataset: label must be +1 or -1");
    if (s.discriminative_slot < 0 || s.discriminative_slot >= n) {
      throw FormatError("dataset: discriminative slot out of range");
    }
    s.noise_radius = rho;
    s.slot_pattern_ids.resize(static_cast<std::size_t>(n));
    for (int& id : s.slot_pattern_ids) {
      if (!(in >> id)) throw FormatError("dataset: truncated pattern ids");
      if (id < 0 || id >= l) throw FormatError("dataset: pattern id out of range");
    }
    s.patches = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
    if (rho > 0.0) {
      for (double& v : s.patches.values()) v = read_number(in);
    } else {
      for (int j = 0; j < n; ++j) {
        auto src = ps.pattern(s.slot_pattern_ids[static_cast<std::size_t>(j)]);
        std::copy(src.begin(), src.end(), s.patches.row(static_cast<std::size_t>(j)).begin());
      }
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

void save_dataset(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_dataset(out, ds);
  if (!out) throw FormatError("write failed: " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_dataset(in);
}

}  // namespace poolnet
