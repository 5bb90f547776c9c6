#pragma once

#include <string_view>

namespace poolnet {

enum class LossKind { Logistic, Hinge };

/// Loss as a function of the margin z = y * score.
/// Logistic: log(1 + e^{-z}); hinge: max(0, 1 - z).
double margin_loss(double z, LossKind kind);
/// Logistic: -1 / (1 + e^z); hinge: -1{z < 1}.
double margin_loss_derivative(double z, LossKind kind);

inline double loss(double score, int y, LossKind kind) { return margin_loss(y * score, kind); }
/// d loss / d score.
inline double loss_score_derivative(double score, int y, LossKind kind) {
  return y * margin_loss_derivative(y * score, kind);
}

/// Classification with sign(0) = -1.
inline int predict_label(double score) { return score > 0.0 ? 1 : -1; }

LossKind parse_loss_kind(std::string_view name);
std::string_view to_string(LossKind kind);

}  // namespace poolnet
