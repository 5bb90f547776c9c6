#include "poolnet/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "poolnet/errors.hpp"
#include "poolnet/loss.hpp"

namespace poolnet {

std::string_view to_string(SvmStatus status) {
  switch (status) {
    case SvmStatus::Optimal:
      return "optimal";
    case SvmStatus::Infeasible:
      return "infeasible";
    case SvmStatus::BudgetExhausted:
      return "budget_exhausted";
  }
  return "unknown";
}

namespace {

double kkt_violation(std::span<const double> alpha, std::span<const double> g) {
  double worst = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double v = alpha[i] > 0.0 ? std::abs(g[i]) : std::max(0.0, g[i]);
    worst = std::max(worst, v);
  }
  return worst;
}

// Solves a x = b for symmetric positive definite a (row-major n x n) in place.
// Returns false when a pivot is not safely positive.
bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 1e-13 * std::max(1.0, a[j * n + j]))) return false;
    d = std::sqrt(d);
    a[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = v / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * n + k] * b[k];
    b[i] = v / a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double v = b[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= a[k * n + i] * b[k];
    b[i] = v / a[i * n + i];
  }
  return true;
}

// Hard-margin SVM without bias is a least-distance problem, min |w| s.t.
// G'w >= 1, which Lawson and Hanson reduce to the NNLS problem
// min |E u - f|, u >= 0, with E'E = Q + 11' and E'f = 1. Their active-set
// method terminates exactly where coordinate ascent only creeps along
// collinear support vectors. The solution maps back as alpha = u / (1 - 1'u);
// 1'u -> 1 means no separator exists.
enum class PolishResult { Converged, Inseparable, Failed };

PolishResult active_set_polish(const Matrix& q, Vector& alpha, double tolerance) {
  const std::size_t m = alpha.size();
  auto mval = [&](std::size_t i, std::size_t j) { return q(i, j) + 1.0; };
  std::vector<double> u(m, 0.0);
  std::vector<char> passive(m, 0);
  std::vector<std::size_t> set;

  auto solve_on_set = [&](std::vector<double>& z) {
    const std::size_t p = set.size();
    std::vector<double> a(p * p);
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = 0; c < p; ++c) a[r * p + c] = mval(set[r], set[c]);
    }
    z.assign(p, 1.0);
    return cholesky_solve(a, z, p);
  };

  std::vector<char> blocked(m, 0);
  const long max_outer = 3 * static_cast<long>(m) + 10;
  for (long outer = 0; outer < max_outer; ++outer) {
    // w = E'(f - E u) = 1 - M u
    double s = 0.0;
    for (double v : u) s += v;
    std::size_t best = m;
    double best_w = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (passive[i] || blocked[i]) continue;
      double mu = 0.0;
      for (std::size_t j : set) mu += mval(i, j) * u[j];
      const double w = 1.0 - mu;
      if (w > best_w) {
        best_w = w;
        best = i;
      }
    }
    const double scale = 1.0 - s;
    if (best == m || best_w <= 0.5 * tolerance * std::max(scale, 0.0)) {
      if (scale <= 1e-12) return PolishResult::Inseparable;
      for (std::size_t i = 0; i < m; ++i) alpha[i] = u[i] / scale;
      return PolishResult::Converged;
    }
    passive[best] = 1;
    set.push_back(best);

    std::vector<double> z;
    bool ok = solve_on_set(z);
    if (!ok || z.back() <= 0.0) {
      // Dependent column or no progress along it: skip it until the set changes.
      passive[best] = 0;
      set.pop_back();
      blocked[best] = 1;
      continue;
    }
    std::fill(blocked.begin(), blocked.end(), 0);
    for (int inner = 0; inner < static_cast<int>(m) + 5; ++inner) {
      bool all_positive = true;
      double theta = 1.0;
      for (std::size_t r = 0; r < set.size(); ++r) {
        if (z[r] <= 0.0) {
          all_positive = false;
          const double cur = u[set[r]];
          theta = std::min(theta, cur / (cur - z[r]));
        }
      }
      if (all_positive) break;
      for (std::size_t r = 0; r < set.size(); ++r) u[set[r]] += theta * (z[r] - u[set[r]]);
      std::vector<std::size_t> kept;
      for (std::size_t idx : set) {
        if (u[idx] > 1e-15) {
          kept.push_back(idx);
        } else {
          u[idx] = 0.0;
          passive[idx] = 0;
        }
      }
      set = std::move(kept);
      if (set.empty() || !solve_on_set(z)) return PolishResult::Failed;
    }
    for (std::size_t r = 0; r < set.size(); ++r) u[set[r]] = z[r];
  }
  return PolishResult::Failed;
}

}  // namespace

DualSolution solve_hard_margin_dual(const Matrix& gram, std::span<const int> labels,
                                    const SvmOptions& opts) {
  const std::size_t m = labels.size();
  if (gram.rows() != m || gram.cols() != m) throw DimensionError("svm: Gram matrix shape");
  if (m == 0) throw ParameterError("svm: empty training set");
  if (!(opts.tolerance > 0.0) || opts.max_sweeps < 1) throw ParameterError("svm: bad options");

  // q(i, j) = y_i y_j K_ij; g = 1 - Q alpha.
  Matrix q(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) q(i, j) = labels[i] * labels[j] * gram(i, j);
  }
  DualSolution out;
  out.alpha.assign(m, 0.0);
  Vector g(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (q(i, i) <= 0.0) {
      out.status = SvmStatus::Infeasible;
      out.kkt_residual = kkt_violation(out.alpha, g);
      return out;
    }
  }
  double total = 0.0;
  for (long sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < m; ++i) {
      const double step = std::max(-out.alpha[i], g[i] / q(i, i));
      if (step == 0.0) continue;
      out.alpha[i] += step;
      total += step;
      const auto col = q.row(i);  // symmetric
      for (std::size_t j = 0; j < m; ++j) g[j] -= step * col[j];
    }
    out.sweeps = sweep;
    out.kkt_residual = kkt_violation(out.alpha, g);
    if (out.kkt_residual <= opts.tolerance) {
      out.status = SvmStatus::Optimal;
      return out;
    }
    if (total > opts.divergence || !std::isfinite(total)) {
      out.status = SvmStatus::Infeasible;
      return out;
    }
  }
  // The sweeps did not certify optimality; finish with the exact active-set
  // method and keep the sweep iterate if that fails too.
  Vector polished = out.alpha;
  switch (active_set_polish(q, polished, opts.tolerance)) {
    case PolishResult::Converged: {
      Vector gp(m, 1.0);
      for (std::size_t i = 0; i < m; ++i) {
        if (polished[i] == 0.0) continue;
        const auto col = q.row(i);
        for (std::size_t j = 0; j < m; ++j) gp[j] -= polished[i] * col[j];
      }
      const double kkt = kkt_violation(polished, gp);
      if (kkt <= opts.tolerance) {
        out.alpha = std::move(polished);
        out.kkt_residual = kkt;
        out.status = SvmStatus::Optimal;
        return out;
      }
      break;
    }
    case PolishResult::Inseparable:
      out.status = SvmStatus::Infeasible;
      return out;
    case PolishResult::Failed:
      break;
  }
  out.status = SvmStatus::BudgetExhausted;
  return out;
}

SvmSolution hard_margin_svm(const Matrix& inputs, std::span<const int> labels,
                            const SvmOptions& opts) {
  const std::size_t m = inputs.rows();
  if (labels.size() != m) throw DimensionError("svm: label count does not match inputs");
  double max_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) max_sq = std::max(max_sq, squared_norm(inputs.row(i)));
  const double scale_sq = max_sq > 0.0 ? max_sq : 1.0;

  Matrix gram_scaled = gram(inputs);
  for (double& v : gram_scaled.values()) v /= scale_sq;
  DualSolution dual = solve_hard_margin_dual(gram_scaled, labels, opts);

  SvmSolution sol;
  sol.status = dual.status;
  sol.sweeps = dual.sweeps;
  sol.kkt_residual = dual.kkt_residual;
  // Undo the scaling: w = sum alpha_i y_i x_i with alpha_i = alpha'_i / s^2.
  sol.alpha.resize(m);
  sol.weights.assign(inputs.cols(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    sol.alpha[i] = dual.alpha[i] / scale_sq;
    if (dual.alpha[i] > 0.0) {
      sol.support.push_back(static_cast<int>(i));
      axpy(sol.alpha[i] * labels[i], inputs.row(i), sol.weights);
    }
  }
  sol.norm_sq = squared_norm(sol.weights);
  sol.margin = m ? std::numeric_limits<double>::infinity() : 0.0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double s = dot(sol.weights, inputs.row(i));
    sol.margin = std::min(sol.margin, labels[i] * s);
    if (predict_label(s) != labels[i]) ++wrong;
  }
  sol.train_error = m ? static_cast<double>(wrong) / static_cast<double>(m) : 0.0;
  return sol;
}

SvmSolution hard_margin_svm(const Dataset& s, const SvmOptions& opts) {
  if (s.empty()) throw ParameterError("svm: empty training set");
  const std::size_t dim = s.samples.front().flat().size();
  Matrix x(s.size(), dim);
  std::vector<int> y(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto f = s.samples[i].flat();
    if (f.size() != dim) throw DimensionError("svm: samples have different sizes");
    std::copy(f.begin(), f.end(), x.row(i).begin());
    y[i] = s.samples[i].label;
  }
  return hard_margin_svm(x, y, opts);
}

}  // namespace poolnet
