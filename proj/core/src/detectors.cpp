#include "poolnet/detectors.hpp"

#include "poolnet/errors.hpp"

namespace poolnet {

namespace {

int argmax_excluding(std::span<const double> row, int excluded) {
  int best = -1;
  for (int j = 0; j < static_cast<int>(row.size()); ++j) {
    if (j == excluded) continue;
    if (best < 0 || row[static_cast<std::size_t>(j)] > row[static_cast<std::size_t>(best)]) best = j;
  }
  return best;
}

}  // namespace

Matrix pattern_projections(const Matrix& filters, const PatternSet& ps) {
  return matmul_nt(filters, ps.matrix());
}

int positive_view(std::span<const double> projection_row) {
  return argmax_excluding(projection_row, kNegativePattern);
}

int negative_view(std::span<const double> projection_row) {
  return argmax_excluding(projection_row, kPositivePattern);
}

LuckySets lucky_sets(const Matrix& projections, std::span<const double> readout) {
  if (projections.rows() != readout.size()) throw DimensionError("lucky_sets: readout size");
  if (projections.cols() < 3) throw DimensionError("lucky_sets: need at least 3 patterns");
  LuckySets out;
  for (std::size_t i = 0; i < projections.rows(); ++i) {
    const auto row = projections.row(i);
    if (readout[i] > 0.0 && positive_view(row) == kPositivePattern &&
        row[kPositivePattern] > 0.0) {
      out.positive.push_back(static_cast<int>(i));
    } else if (readout[i] < 0.0 && negative_view(row) == kNegativePattern &&
               row[kNegativePattern] > 0.0) {
      out.negative.push_back(static_cast<int>(i));
    }
  }
  return out;
}

LuckySets lucky_sets(const CnnParams& p, const PatternSet& ps) {
  return lucky_sets(pattern_projections(p.filters, ps), p.readout);
}

}  // namespace poolnet
