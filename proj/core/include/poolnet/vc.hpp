#pragma once

#include <span>
#include <vector>

#include "poolnet/cnn.hpp"
#include "poolnet/patterns.hpp"

namespace poolnet {

/// Shattering construction for d = 2n. Points are indexed by I in
/// [0, 2^{n-1}); bit j of I selects pattern 2j+2 (bit set) or 2j+3 (bit
/// clear) for slot j < n-1, and the last slot holds a discriminative pattern.
///
/// The network output on x_I is sum over I' != complement(I) of alpha_I', so
/// realizing labels y needs (J - I) alpha = b with b_I = y_{complement(I)}.

/// alpha = (J - I)^{-1} b = -b + (sum b) / (N - 1). Requires N >= 2.
Vector vc_solve_alpha(std::span<const int> labels);

/// max_I |sum_{I' != I} alpha_I' - y_{complement(I)}|.
double vc_residual(std::span<const double> alpha, std::span<const int> labels);

/// The 2^{n-1} points of the construction (labels left at +1).
std::vector<LabeledSample> vc_points(const PatternSet& ps, int n, bool last_slot_positive = true);

/// w_I = max(alpha_I, 0) sum_{j < n-1} x_I[j] with readout +1, followed by
/// u_I = max(-alpha_I, 0) sum_{j < n-1} x_I[j] with readout -1.
CnnParams vc_network(const PatternSet& ps, int n, std::span<const double> alpha);

struct ShatterInstance {
  int n = 0;
  std::vector<int> labels;
  Vector alpha;
  double residual = 0.0;
  std::vector<LabeledSample> points;
  CnnParams network;
  Vector outputs;
  double max_abs_error = 0.0;  ///< max_I |N(x_I) - y_I|
  bool signs_match = false;
  bool exact = false;  ///< signs match and max_abs_error <= tolerance
};

/// Builds the network for `labels` and evaluates it on every point. The
/// pattern set must have exactly d = 2n patterns of dimension 2n.
ShatterInstance vc_build_and_verify(std::span<const int> labels, const PatternSet& ps,
                                    bool last_slot_positive = true, double tolerance = 1e-6);

}  // namespace poolnet
