#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "poolnet/patterns.hpp"

namespace poolnet {

/// Line-oriented dataset format, version 1 (see docs/formats.md).
///
///   poolnet-dataset 1
///   d <d>
///   n <n>
///   l <l>
///   m <m>
///   rho <rho>
///   seed <seed>
///   mode haar|standard
///   patterns
///   <l lines of d numbers>
///   samples
///   <label> <slot> <id_1> ... <id_n> [n*d patch numbers when rho > 0]
///
/// Numbers are printed with 17 significant digits, which round-trips every
/// double exactly. At rho = 0 patches are rebuilt from the pattern ids.
void write_dataset(std::ostream& out, const Dataset& ds);
Dataset read_dataset(std::istream& in);

void save_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& path);

/// %.17g formatting shared by every text writer in the library.
std::string format_double(double v);

}  // namespace poolnet
