#pragma once

#include <vector>

#include "poolnet/cnn.hpp"
#include "poolnet/patterns.hpp"

namespace poolnet {

/// k x l matrix of o_j . w_i.
Matrix pattern_projections(const Matrix& filters, const PatternSet& ps);

/// argmax over every pattern except the negative one (lowest id on ties).
int positive_view(std::span<const double> projection_row);
/// argmax over every pattern except the positive one.
int negative_view(std::span<const double> projection_row);

/// Filters whose positive view is the positive pattern with a strictly
/// positive projection and readout +1, and the mirror set for the negative
/// pattern with readout -1.
struct LuckySets {
  std::vector<int> positive;
  std::vector<int> negative;
};

LuckySets lucky_sets(const CnnParams& p, const PatternSet& ps);
LuckySets lucky_sets(const Matrix& projections, std::span<const double> readout);

}  // namespace poolnet
