#include "poolnet/checkpoint.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "poolnet/dataset_io.hpp"
#include "poolnet/errors.hpp"

namespace poolnet {

namespace {

void expect(std::istream& in, const std::string& token) {
  std::string got;
  if (!(in >> got) || got != token) throw FormatError("checkpoint: expected '" + token + "'");
}

double number(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw FormatError("checkpoint: truncated");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw FormatError("checkpoint: bad number '" + tok + "'");
  }
  if (used != tok.size()) throw FormatError("checkpoint: bad number '" + tok + "'");
  return v;
}

}  // namespace

void write_cnn(std::ostream& out, const CnnParams& p) {
  p.validate();
  out << "poolnet-cnn 1\n";
  out << "k " << p.filters.rows() << "\nd " << p.filters.cols() << "\nfilters\n";
  for (std::size_t i = 0; i < p.filters.rows(); ++i) {
    auto row = p.filters.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << format_double(row[c]);
    out << '\n';
  }
  out << "readout\n";
  for (std::size_t i = 0; i < p.readout.size(); ++i) {
    out << (i ? " " : "") << format_double(p.readout[i]);
  }
  out << '\n';
}

CnnParams read_cnn(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "poolnet-cnn") throw FormatError("checkpoint: bad header");
  if (version != 1) throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  long k = 0, d = 0;
  expect(in, "k");
  if (!(in >> k) || k < 1) throw FormatError("checkpoint: bad k");
  expect(in, "d");
  if (!(in >> d) || d < 1) throw FormatError("checkpoint: bad d");
  CnnParams p;
  p.filters = Matrix(static_cast<std::size_t>(k), static_cast<std::size_t>(d));
  expect(in, "filters");
  for (double& v : p.filters.values()) v = number(in);
  expect(in, "readout");
  p.readout.resize(static_cast<std::size_t>(k));
  for (double& v : p.readout) v = number(in);
  try {
    p.validate();
  } catch (const NumericError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  return p;
}

void save_cnn(const std::filesystem::path& path, const CnnParams& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_cnn(out, p);
  if (!out) throw FormatError("write failed: " + path.string());
}

CnnParams load_cnn(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_cnn(in);
}

}  // namespace poolnet
