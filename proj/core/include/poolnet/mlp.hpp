#pragma once

#include <cstdint>
#include <span>

#include "poolnet/dense.hpp"
#include "poolnet/loss.hpp"
#include "poolnet/optimizer.hpp"
#include "poolnet/patterns.hpp"

namespace poolnet {

/// One hidden layer on the flattened input: sum_i a_i psi(w_i . x) with
/// psi(u) = max(alpha u, u). No biases.
struct MlpParams {
  Matrix weights;  ///< h x (n d)
  Vector readout;  ///< h
  double leak = 0.1;

  int hidden() const { return static_cast<int>(weights.rows()); }
};

double leaky_relu(double u, double leak);

double mlp_forward(const MlpParams& p, std::span<const double> x);
/// Scores for the rows of `inputs`.
Vector mlp_scores(const MlpParams& p, const Matrix& inputs);

struct MlpGradient {
  Matrix weights;
  Vector readout;
  double loss = 0.0;
};

/// Mean-loss gradient over the rows of `inputs`. At u = 0 the slope is alpha.
MlpGradient mlp_gradient(const MlpParams& p, const Matrix& inputs, std::span<const int> labels,
                         LossKind kind);

/// Hidden width whose parameter count h(nd + 1) is closest to k(d + 1).
int matched_hidden_width(int channels, int d, int n);

struct MlpConfig {
  int hidden = 52;
  double leak = 0.1;
  OptimizerKind optimizer = OptimizerKind::GradientDescent;
  double lr = 0.05;
  int epochs = 200;
  int batch_size = 10;  ///< 0 means full batch
  LossKind loss = LossKind::Logistic;
  std::uint64_t seed = 1;
  /// Stop after an epoch whose full-set loss is below this value (0 disables).
  double loss_tolerance = 0.0;
};

/// Weights N(0, 1/(nd)), readout uniform in {+-1/sqrt(h)}.
MlpParams init_mlp(int hidden, int input_dim, double leak, RngStream& rng);

struct MlpRun {
  MlpParams params;
  Vector epoch_loss;  ///< full-set loss after each epoch
  double train_error = 0.0;
};

MlpRun mlp_train(const Dataset& s, const MlpConfig& cfg);

/// Flattened inputs of a sample range as rows.
Matrix flat_inputs(std::span<const LabeledSample> samples);

}  // namespace poolnet
