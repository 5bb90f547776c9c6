#include "poolnet/optimizer.hpp"

#include <cmath>
#include <string>

#include "poolnet/errors.hpp"

namespace poolnet {

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "gd") return OptimizerKind::GradientDescent;
  if (name == "adam") return OptimizerKind::Adam;
  throw ParameterError("unknown optimizer '" + std::string(name) + "'");
}

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::Adam ? "adam" : "gd";
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, std::size_t size,
                     AdamSettings adam)
    : kind_(kind), lr_(learning_rate), adam_(adam) {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ParameterError("optimizer: learning rate must be finite and non-negative");
  }
  if (kind == OptimizerKind::Adam) {
    m_.assign(size, 0.0);
    v_.assign(size, 0.0);
  }
}

void Optimizer::update(std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size()) throw DimensionError("optimizer: gradient size mismatch");
  ++t_;
  if (kind_ == OptimizerKind::GradientDescent) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grad[i];
    return;
  }
  if (m_.size() != params.size()) throw DimensionError("optimizer: parameter block size changed");
  const double c1 = 1.0 - std::pow(adam_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(adam_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = adam_.beta1 * m_[i] + (1.0 - adam_.beta1) * grad[i];
    v_[i] = adam_.beta2 * v_[i] + (1.0 - adam_.beta2) * grad[i] * grad[i];
    const double mhat = m_[i] / c1;
    const double vhat = v_[i] / c2;
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + adam_.epsilon);
  }
}

}  // namespace poolnet
