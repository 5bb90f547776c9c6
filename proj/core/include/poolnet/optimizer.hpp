#pragma once

#include <span>
#include <string_view>

#include "poolnet/dense.hpp"

namespace poolnet {

enum class OptimizerKind { GradientDescent, Adam };

OptimizerKind parse_optimizer_kind(std::string_view name);
std::string_view to_string(OptimizerKind kind);

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First-order update rule over one flat parameter block. Each block keeps its
/// own moment estimates, so the two CNN layers use two instances.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, std::size_t size,
            AdamSettings adam = {});

  /// params -= step(grad)
  void update(std::span<double> params, std::span<const double> grad);

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return lr_; }
  long steps() const { return t_; }

 private:
  OptimizerKind kind_;
  double lr_;
  AdamSettings adam_;
  Vector m_;
  Vector v_;
  long t_ = 0;
};

}  // namespace poolnet
