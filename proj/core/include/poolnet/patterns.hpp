#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "poolnet/dense.hpp"
#include "poolnet/rng.hpp"
#include "poolnet/sampling.hpp"

namespace poolnet {

// Pattern ids are 0-based throughout the library and in every file format.
inline constexpr int kPositivePattern = 0;
inline constexpr int kNegativePattern = 1;

/// Orthonormal pattern dictionary. Row 0 is the positive pattern, row 1 the
/// negative pattern, rows 2..l-1 are spurious.
class PatternSet {
 public:
  /// Validates 3 <= l <= d and orthonormality of the rows.
  explicit PatternSet(Matrix patterns, OrthoMode mode = OrthoMode::Haar);

  static PatternSet sample(int d, int l, RngStream& rng, OrthoMode mode = OrthoMode::Haar);

  int dimension() const { return static_cast<int>(patterns_.cols()); }
  int count() const { return static_cast<int>(patterns_.rows()); }
  int spurious_count() const { return count() - 2; }
  bool is_spurious(int id) const { return id >= 2 && id < count(); }
  OrthoMode mode() const { return mode_; }

  std::span<const double> pattern(int id) const;
  const Matrix& matrix() const { return patterns_; }

 private:
  Matrix patterns_;
  OrthoMode mode_;
};

/// One labeled input of n patches. Patch j is row j of `patches`.
struct LabeledSample {
  Matrix patches;
  int label = 1;
  std::vector<int> slot_pattern_ids;
  int discriminative_slot = 0;
  double noise_radius = 0.0;

  int patch_count() const { return static_cast<int>(patches.rows()); }
  /// The concatenated input x in R^{n d}.
  std::span<const double> flat() const { return patches.values(); }
  bool contains_pattern(int id) const;
};

/// Samples in sampling order plus the dictionary they were drawn from.
struct Dataset {
  std::shared_ptr<const PatternSet> patterns;
  std::vector<LabeledSample> samples;
  int patch_count = 0;
  double noise_radius = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  int positives() const;
  int negatives() const;
};

/// Draws (x, y) from the pattern-detection distribution: y uniform in {+1,-1},
/// the class pattern at a uniform slot, every other slot an i.i.d. uniform
/// spurious pattern.
LabeledSample sample_labeled(const PatternSet& ps, int n, RngStream& rng);

/// Perturbs every patch by an independent vector uniform in the rho-ball.
LabeledSample add_noise(const LabeledSample& s, double rho, RngStream& rng);

/// m i.i.d. samples; when rho > 0 each is perturbed with add_noise.
Dataset sample_dataset(std::shared_ptr<const PatternSet> ps, int n, int m, RngStream& rng,
                       double rho = 0.0);

/// First ceil(m/2) samples and the remainder.
std::pair<Dataset, Dataset> split_dataset(const Dataset& s);

/// s_i = (1/m) sum_j y_j 1{pattern i appears in x_j}, membership by provenance.
Vector pattern_stats(const Dataset& s);

/// n concatenated copies of (o_positive - o_negative); separates noiseless
/// data with y w.x = 1 exactly.
Vector difference_separator(const PatternSet& ps, int n);

}  // namespace poolnet
