#include "poolnet/vc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "poolnet/errors.hpp"
#include "poolnet/loss.hpp"

namespace poolnet {

namespace {

void check_labels(std::span<const int> labels) {
  if (labels.size() < 2) throw ParameterError("vc: need at least two points (n >= 2)");
  for (int y : labels) {
    if (y != 1 && y != -1) throw ParameterError("vc: labels must be +1 or -1");
  }
}

std::size_t complement(std::size_t i, std::size_t count) { return (count - 1) ^ i; }

void check_shape(const PatternSet& ps, int n) {
  if (n < 2) throw ParameterError("vc: need n >= 2");
  if (n > 30) throw ParameterError("vc: n too large");
  if (ps.dimension() != 2 * n || ps.count() != 2 * n) {
    throw ParameterError("vc: construction needs d = l = 2n = " + std::to_string(2 * n) +
                         ", got d = " + std::to_string(ps.dimension()) +
                         ", l = " + std::to_string(ps.count()));
  }
}

}  // namespace

Vector vc_solve_alpha(std::span<const int> labels) {
  check_labels(labels);
  const std::size_t count = labels.size();
  if ((count & (count - 1)) != 0) throw ParameterError("vc: label count must be a power of two");
  double total = 0.0;
  for (int y : labels) total += y;
  const double shift = total / static_cast<double>(count - 1);
  Vector alpha(count);
  for (std::size_t i = 0; i < count; ++i) alpha[i] = -labels[complement(i, count)] + shift;
  return alpha;
}

double vc_residual(std::span<const double> alpha, std::span<const int> labels) {
  if (alpha.size() != labels.size()) throw DimensionError("vc_residual: size mismatch");
  const std::size_t count = labels.size();
  double total = 0.0;
  for (double a : alpha) total += a;
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double lhs = total - alpha[i];
    worst = std::max(worst, std::abs(lhs - labels[complement(i, count)]));
  }
  return worst;
}

std::vector<LabeledSample> vc_points(const PatternSet& ps, int n, bool last_slot_positive) {
  check_shape(ps, n);
  const std::size_t count = std::size_t{1} << (n - 1);
  const auto d = static_cast<std::size_t>(ps.dimension());
  std::vector<LabeledSample> points(count);
  for (std::size_t i = 0; i < count; ++i) {
    LabeledSample& s = points[i];
    s.patches = Matrix(static_cast<std::size_t>(n), d);
    s.slot_pattern_ids.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n - 1; ++j) {
      const bool bit = ((i >> j) & 1U) != 0;
      s.slot_pattern_ids[static_cast<std::size_t>(j)] = bit ? 2 * j + 2 : 2 * j + 3;
    }
    const int last = last_slot_positive ? kPositivePattern : kNegativePattern;
    s.slot_pattern_ids[static_cast<std::size_t>(n - 1)] = last;
    s.discriminative_slot = n - 1;
    s.label = last_slot_positive ? 1 : -1;
    for (int j = 0; j < n; ++j) {
      const auto src = ps.pattern(s.slot_pattern_ids[static_cast<std::size_t>(j)]);
      std::copy(src.begin(), src.end(), s.patches.row(static_cast<std::size_t>(j)).begin());
    }
  }
  return points;
}

CnnParams vc_network(const PatternSet& ps, int n, std::span<const double> alpha) {
  check_shape(ps, n);
  const std::size_t count = std::size_t{1} << (n - 1);
  if (alpha.size() != count) throw DimensionError("vc_network: alpha size");
  const auto d = static_cast<std::size_t>(ps.dimension());
  CnnParams p;
  p.filters = Matrix(2 * count, d);
  p.readout.assign(2 * count, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double pos = std::max(alpha[i], 0.0);
    const double neg = std::max(-alpha[i], 0.0);
    p.readout[count + i] = -1.0;
    for (int j = 0; j < n - 1; ++j) {
      const bool bit = ((i >> j) & 1U) != 0;
      const auto o = ps.pattern(bit ? 2 * j + 2 : 2 * j + 3);
      axpy(pos, o, p.filters.row(i));
      axpy(neg, o, p.filters.row(count + i));
    }
  }
  return p;
}

ShatterInstance vc_build_and_verify(std::span<const int> labels, const PatternSet& ps,
                                    bool last_slot_positive, double tolerance) {
  ShatterInstance inst;
  inst.n = ps.dimension() / 2;
  check_shape(ps, inst.n);
  const std::size_t count = std::size_t{1} << (inst.n - 1);
  if (labels.size() != count) {
    throw DimensionError("vc: expected " + std::to_string(count) + " labels");
  }
  inst.labels.assign(labels.begin(), labels.end());
  inst.alpha = vc_solve_alpha(labels);
  inst.residual = vc_residual(inst.alpha, labels);
  inst.points = vc_points(ps, inst.n, last_slot_positive);
  for (std::size_t i = 0; i < count; ++i) inst.points[i].label = labels[i];
  inst.network = vc_network(ps, inst.n, inst.alpha);
  inst.outputs = batch_scores(inst.network, PatchBatch::from_samples(inst.points, &ps));
  inst.signs_match = true;
  for (std::size_t i = 0; i < count; ++i) {
    inst.max_abs_error = std::max(inst.max_abs_error, std::abs(inst.outputs[i] - labels[i]));
    if (predict_label(inst.outputs[i]) != labels[i]) inst.signs_match = false;
  }
  inst.exact = inst.signs_match && inst.max_abs_error <= tolerance;
  return inst;
}

}  // namespace poolnet
