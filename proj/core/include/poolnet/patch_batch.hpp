#pragma once

#include <span>
#include <vector>

#include "poolnet/dense.hpp"
#include "poolnet/patterns.hpp"

namespace poolnet {

/// A batch of samples stored as a table of distinct patch vectors plus, per
/// sample, the table row used in each slot.
///
/// Noiseless patches that are bitwise equal to a dictionary pattern share the
/// dictionary row, so filter responses are computed once per pattern instead
/// of once per patch. Noisy patches get their own rows. Either way the
/// arithmetic is the same as evaluating every patch directly.
struct PatchBatch {
  Matrix table;                 ///< distinct patch vectors, N x d
  std::vector<int> patch_rows;  ///< size samples*n, sample-major
  std::vector<int> labels;
  int patch_count = 0;

  std::size_t samples() const { return labels.size(); }
  std::span<const int> rows_of(std::size_t sample) const {
    return {patch_rows.data() + sample * static_cast<std::size_t>(patch_count),
            static_cast<std::size_t>(patch_count)};
  }

  /// When `ps` is given, its rows form the head of the table.
  static PatchBatch from_samples(std::span<const LabeledSample> samples, const PatternSet* ps);
  static PatchBatch from_dataset(const Dataset& ds);
  /// Sub-batch of the given samples. Only table rows they use are kept, in
  /// first-use order, so responses are not computed for unused patches.
  PatchBatch select(std::span<const int> sample_ids) const;

  /// Concatenated input x in R^{n d} for one sample.
  Vector flat(std::size_t sample) const;
  /// Rows of the flat inputs, samples x (n d).
  Matrix flat_matrix() const;
};

}  // namespace poolnet
