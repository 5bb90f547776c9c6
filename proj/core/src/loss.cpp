#include "poolnet/loss.hpp"

#include <cmath>
#include <string>

#include "poolnet/errors.hpp"

namespace poolnet {

double margin_loss(double z, LossKind kind) {
  switch (kind) {
    case LossKind::Logistic:
      // Split at 0 so neither branch exponentiates a large positive number.
      return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    case LossKind::Hinge:
      return z < 1.0 ? 1.0 - z : 0.0;
  }
  return 0.0;
}

double margin_loss_derivative(double z, LossKind kind) {
  switch (kind) {
    case LossKind::Logistic:
      if (z > 0.0) {
        const double e = std::exp(-z);
        return -e / (1.0 + e);
      }
      return -1.0 / (1.0 + std::exp(z));
    case LossKind::Hinge:
      return z < 1.0 ? -1.0 : 0.0;
  }
  return 0.0;
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "logistic") return LossKind::Logistic;
  if (name == "hinge") return LossKind::Hinge;
  throw ParameterError("unknown loss kind '" + std::string(name) + "'");
}

std::string_view to_string(LossKind kind) {
  return kind == LossKind::Hinge ? "hinge" : "logistic";
}

}  // namespace poolnet
