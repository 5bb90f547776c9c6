#pragma once

#include <functional>
#include <span>

#include "poolnet/cnn.hpp"
#include "poolnet/mlp.hpp"
#include "poolnet/patterns.hpp"

namespace poolnet {

/// Scores a contiguous range of samples.
using BatchScorer = std::function<Vector(std::span<const LabeledSample>)>;

BatchScorer cnn_scorer(const CnnParams& p, const PatternSet* ps);
BatchScorer mlp_scorer(const MlpParams& p);
/// w . x on the flattened input.
BatchScorer linear_scorer(Vector w);

/// Fraction of samples with sign(score) != y, sign(0) = -1.
double error_rate(std::span<const double> scores, std::span<const LabeledSample> samples);

/// Monte Carlo test error on `count` fresh samples, drawn and scored in
/// chunks of at most 1000.
double test_error(const BatchScorer& model, const PatternSet& ps, int n, double rho, int count,
                  RngStream& rng);

}  // namespace poolnet
