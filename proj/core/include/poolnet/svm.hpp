#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "poolnet/dense.hpp"
#include "poolnet/patterns.hpp"

namespace poolnet {

enum class SvmStatus {
  Optimal,          ///< KKT conditions met within tolerance
  Infeasible,       ///< dual diverged or a zero input needs a positive margin
  BudgetExhausted,  ///< no certificate within the sweep budget
};

std::string_view to_string(SvmStatus status);

struct SvmOptions {
  double tolerance = 1e-8;  ///< KKT violation, measured after scaling inputs to unit max norm
  long max_sweeps = 20000;
  double divergence = 1e12;  ///< sum of scaled duals above which the data counts as inseparable
};

struct DualSolution {
  Vector alpha;
  SvmStatus status = SvmStatus::BudgetExhausted;
  long sweeps = 0;
  double kkt_residual = 0.0;
};

/// Dual coordinate ascent for
///   max sum(alpha) - 1/2 alpha' Q alpha,  alpha >= 0,  Q_ij = y_i y_j K_ij,
/// i.e. the hard-margin problem without bias. Works on any Gram matrix.
DualSolution solve_hard_margin_dual(const Matrix& gram, std::span<const int> labels,
                                    const SvmOptions& opts = {});

struct SvmSolution {
  Vector weights;
  double margin = 0.0;   ///< min_i y_i w . x_i
  double norm_sq = 0.0;
  double kkt_residual = 0.0;
  std::vector<int> support;
  SvmStatus status = SvmStatus::BudgetExhausted;
  long sweeps = 0;
  Vector alpha;
  double train_error = 0.0;

  bool separable() const { return status == SvmStatus::Optimal; }
  double score(std::span<const double> x) const { return dot(weights, x); }
};

/// Minimum-norm w with y_i w . x_i >= 1, inputs given as rows.
SvmSolution hard_margin_svm(const Matrix& inputs, std::span<const int> labels,
                            const SvmOptions& opts = {});
/// Same on the flattened samples of a dataset.
SvmSolution hard_margin_svm(const Dataset& s, const SvmOptions& opts = {});

}  // namespace poolnet
