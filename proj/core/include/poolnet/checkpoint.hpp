#pragma once

#include <filesystem>
#include <iosfwd>

#include "poolnet/cnn.hpp"

namespace poolnet {

/// Text checkpoint, version 1:
///
///   poolnet-cnn 1
///   k <k>
///   d <d>
///   filters
///   <k lines of d numbers>
///   readout
///   <k numbers, one line>
void write_cnn(std::ostream& out, const CnnParams& p);
CnnParams read_cnn(std::istream& in);
void save_cnn(const std::filesystem::path& path, const CnnParams& p);
CnnParams load_cnn(const std::filesystem::path& path);

}  // namespace poolnet
