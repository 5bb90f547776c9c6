#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "poolnet/dense.hpp"
#include "poolnet/loss.hpp"
#include "poolnet/patch_batch.hpp"
#include "poolnet/patterns.hpp"
#include "poolnet/rng.hpp"

namespace poolnet {

/// N(x) = sum_i a_i max_j relu(w_i . x[j]) with non-overlapping patches.
struct CnnParams {
  Matrix filters;  ///< k x d, row i is w_i
  Vector readout;  ///< a, length k

  int channels() const { return static_cast<int>(filters.rows()); }
  int dimension() const { return static_cast<int>(filters.cols()); }
  /// Throws DimensionError / NumericError on inconsistent or non-finite values.
  void validate() const;
};

/// Per-filter pooling record for one input.
struct ActivationTrace {
  std::vector<int> argmax_slot;      ///< lowest slot attaining max_j w_i . x[j]
  std::vector<std::uint8_t> active;  ///< max pre-activation > 0
  Vector pooled;                     ///< w_i . x[argmax] when active, else 0
};

struct CnnForward {
  double score = 0.0;
  ActivationTrace trace;
};

/// Filters uniform on the sphere of radius r, readout uniform in {+1, -1}.
CnnParams init_cnn(int k, int d, double r, RngStream& rng);

CnnForward cnn_forward(const CnnParams& p, const Matrix& patches);
double cnn_score(const CnnParams& p, const Matrix& patches);

/// Per-sample reference gradients of the mean loss over `batch`. At a zero
/// pre-activation the filter counts as inactive (subgradient 0).
Matrix grad_filters(const CnnParams& p, std::span<const LabeledSample> batch, LossKind kind);
Vector grad_readout(const CnnParams& p, std::span<const LabeledSample> batch, LossKind kind);

/// Forward pass over a PatchBatch: each filter is applied once per table row.
struct BatchForward {
  Matrix responses;              ///< k x N, w_i . table[r]
  Matrix pooled;                 ///< k x samples
  std::vector<int> argmax_slot;  ///< k x samples, row-major
  Vector scores;                 ///< length samples

  int slot(std::size_t filter, std::size_t sample) const {
    return argmax_slot[filter * pooled.cols() + sample];
  }
};

BatchForward forward_batch(const CnnParams& p, const PatchBatch& batch);
/// Same pooling from precomputed k x N responses (used when the readout changes
/// but the filters do not).
BatchForward pool_responses(Matrix responses, std::span<const double> readout,
                            const PatchBatch& batch);

double mean_loss(std::span<const double> scores, std::span<const int> labels, LossKind kind);

struct CnnGradient {
  Matrix filters;  ///< empty unless requested
  Vector readout;  ///< empty unless requested
};

CnnGradient batch_gradient(const CnnParams& p, const PatchBatch& batch, const BatchForward& fwd,
                           LossKind kind, bool filters, bool readout);

Vector batch_scores(const CnnParams& p, const PatchBatch& batch);

}  // namespace poolnet
