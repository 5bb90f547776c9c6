#include "poolnet/evaluate.hpp"

#include <algorithm>
#include <vector>

#include "poolnet/errors.hpp"

namespace poolnet {

BatchScorer cnn_scorer(const CnnParams& p, const PatternSet* ps) {
  return [&p, ps](std::span<const LabeledSample> samples) {
    return batch_scores(p, PatchBatch::from_samples(samples, ps));
  };
}

BatchScorer mlp_scorer(const MlpParams& p) {
  return [&p](std::span<const LabeledSample> samples) {
    return mlp_scores(p, flat_inputs(samples));
  };
}

BatchScorer linear_scorer(Vector w) {
  return [w = std::move(w)](std::span<const LabeledSample> samples) {
    Vector out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = dot(w, samples[i].flat());
    return out;
  };
}

double error_rate(std::span<const double> scores, std::span<const LabeledSample> samples) {
  if (scores.size() != samples.size()) throw DimensionError("error_rate: size mismatch");
  if (samples.empty()) throw ParameterError("error_rate: no samples");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (predict_label(scores[i]) != samples[i].label) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(samples.size());
}

double test_error(const BatchScorer& model, const PatternSet& ps, int n, double rho, int count,
                  RngStream& rng) {
  if (count < 1) throw ParameterError("test_error: count must be >= 1");
  if (rho < 0.0) throw ParameterError("test_error: noise radius must be non-negative");
  constexpr int kChunk = 1000;
  std::vector<LabeledSample> chunk;
  std::size_t wrong = 0;
  for (int done = 0; done < count;) {
    const int len = std::min(kChunk, count - done);
    chunk.clear();
    for (int i = 0; i < len; ++i) {
      LabeledSample s = sample_labeled(ps, n, rng);
      if (rho > 0.0) s = add_noise(s, rho, rng);
      chunk.push_back(std::move(s));
    }
    const Vector scores = model(chunk);
    if (scores.size() != chunk.size()) throw DimensionError("test_error: scorer output size");
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (predict_label(scores[i]) != chunk[i].label) ++wrong;
    }
    done += len;
  }
  return static_cast<double>(wrong) / static_cast<double>(count);
}

}  // namespace poolnet
