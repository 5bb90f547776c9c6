#include "poolnet/cnn.hpp"

#include <limits>
#include <string>

#include "poolnet/errors.hpp"
#include "poolnet/sampling.hpp"

namespace poolnet {

void CnnParams::validate() const {
  if (readout.size() != filters.rows()) {
    throw DimensionError("CnnParams: " + std::to_string(filters.rows()) + " filters but " +
                         std::to_string(readout.size()) + " readout weights");
  }
  if (!all_finite(filters.values()) || !all_finite(readout)) {
    throw NumericError("CnnParams: non-finite parameter");
  }
}

CnnParams init_cnn(int k, int d, double r, RngStream& rng) {
  if (k < 1) throw ParameterError("init_cnn: need k >= 1");
  if (!(r > 0.0)) throw ParameterError("init_cnn: radius must be positive");
  CnnParams p;
  p.filters = Matrix(static_cast<std::size_t>(k), static_cast<std::size_t>(d));
  for (int i = 0; i < k; ++i) {
    const Vector w = sample_sphere(d, r, rng);
    std::copy(w.begin(), w.end(), p.filters.row(static_cast<std::size_t>(i)).begin());
  }
  p.readout.resize(static_cast<std::size_t>(k));
  for (double& a : p.readout) a = rng.sign();
  return p;
}

CnnForward cnn_forward(const CnnParams& p, const Matrix& patches) {
  if (patches.cols() != p.filters.cols()) {
    throw DimensionError("cnn_forward: patch dimension " + std::to_string(patches.cols()) +
                         " vs filter dimension " + std::to_string(p.filters.cols()));
  }
  if (p.readout.size() != p.filters.rows()) throw DimensionError("cnn_forward: readout size");
  const std::size_t k = p.filters.rows();
  CnnForward out;
  out.trace.argmax_slot.assign(k, 0);
  out.trace.active.assign(k, 0);
  out.trace.pooled.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    int best_slot = 0;
    for (std::size_t j = 0; j < patches.rows(); ++j) {
      const double v = dot(p.filters.row(i), patches.row(j));
      if (v > best) {
        best = v;
        best_slot = static_cast<int>(j);
      }
    }
    out.trace.argmax_slot[i] = best_slot;
    if (best > 0.0) {
      out.trace.active[i] = 1;
      out.trace.pooled[i] = best;
    }
    out.score += p.readout[i] * out.trace.pooled[i];
  }
  return out;
}

double cnn_score(const CnnParams& p, const Matrix& patches) { return cnn_forward(p, patches).score; }

Matrix grad_filters(const CnnParams& p, std::span<const LabeledSample> batch, LossKind kind) {
  if (batch.empty()) throw ParameterError("grad_filters: empty batch");
  Matrix g(p.filters.rows(), p.filters.cols());
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (const auto& s : batch) {
    const CnnForward f = cnn_forward(p, s.patches);
    const double coef = loss_score_derivative(f.score, s.label, kind) * inv;
    for (std::size_t i = 0; i < g.rows(); ++i) {
      if (!f.trace.active[i]) continue;
      axpy(coef * p.readout[i], s.patches.row(static_cast<std::size_t>(f.trace.argmax_slot[i])),
           g.row(i));
    }
  }
  return g;
}

Vector grad_readout(const CnnParams& p, std::span<const LabeledSample> batch, LossKind kind) {
  if (batch.empty()) throw ParameterError("grad_readout: empty batch");
  Vector g(p.readout.size(), 0.0);
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (const auto& s : batch) {
    const CnnForward f = cnn_forward(p, s.patches);
    const double coef = loss_score_derivative(f.score, s.label, kind) * inv;
    axpy(coef, f.trace.pooled, g);
  }
  return g;
}

BatchForward pool_responses(Matrix responses, std::span<const double> readout,
                            const PatchBatch& batch) {
  const std::size_t k = responses.rows();
  const std::size_t m = batch.samples();
  if (readout.size() != k) throw DimensionError("pool_responses: readout size");
  if (responses.cols() != batch.table.rows()) throw DimensionError("pool_responses: table size");
  BatchForward f;
  f.pooled = Matrix(k, m);
  f.argmax_slot.assign(k * m, 0);
  f.scores.assign(m, 0.0);
  const std::size_t n = static_cast<std::size_t>(batch.patch_count);
  for (std::size_t i = 0; i < k; ++i) {
    const double* resp = responses.data() + i * responses.cols();
    double* pooled = f.pooled.data() + i * m;
    int* slots = f.argmax_slot.data() + i * m;
    const double a = readout[i];
    for (std::size_t s = 0; s < m; ++s) {
      const int* rows = batch.patch_rows.data() + s * n;
      double best = resp[rows[0]];
      int best_slot = 0;
      for (std::size_t j = 1; j < n; ++j) {
        const double v = resp[rows[j]];
        if (v > best) {
          best = v;
          best_slot = static_cast<int>(j);
        }
      }
      slots[s] = best_slot;
      pooled[s] = best > 0.0 ? best : 0.0;
      f.scores[s] += a * pooled[s];
    }
  }
  f.responses = std::move(responses);
  return f;
}

BatchForward forward_batch(const CnnParams& p, const PatchBatch& batch) {
  if (batch.table.cols() != p.filters.cols() && batch.samples() > 0) {
    throw DimensionError("forward_batch: patch dimension does not match filters");
  }
  if (batch.samples() == 0) {
    BatchForward f;
    f.pooled = Matrix(p.filters.rows(), 0);
    return f;
  }
  return pool_responses(matmul_nt(p.filters, batch.table), p.readout, batch);
}

double mean_loss(std::span<const double> scores, std::span<const int> labels, LossKind kind) {
  if (scores.size() != labels.size()) throw DimensionError("mean_loss: size mismatch");
  if (scores.empty()) throw ParameterError("mean_loss: empty batch");
  double total = 0.0;
  for (std::size_t s = 0; s < scores.size(); ++s) total += loss(scores[s], labels[s], kind);
  return total / static_cast<double>(scores.size());
}

CnnGradient batch_gradient(const CnnParams& p, const PatchBatch& batch, const BatchForward& fwd,
                           LossKind kind, bool filters, bool readout) {
  const std::size_t m = batch.samples();
  if (m == 0) throw ParameterError("batch_gradient: empty batch");
  const std::size_t k = p.filters.rows();
  const std::size_t n = static_cast<std::size_t>(batch.patch_count);
  const double inv = 1.0 / static_cast<double>(m);
  Vector coef(m);
  for (std::size_t s = 0; s < m; ++s) {
    coef[s] = loss_score_derivative(fwd.scores[s], batch.labels[s], kind) * inv;
  }

  CnnGradient g;
  if (readout) {
    g.readout.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      const double* pooled = fwd.pooled.data() + i * m;
      double acc = 0.0;
      for (std::size_t s = 0; s < m; ++s) acc += coef[s] * pooled[s];
      g.readout[i] = acc;
    }
  }
  if (filters) {
    // Scatter each active filter's coefficient onto the table row it pooled,
    // then map table rows back to patch vectors with one product.
    Matrix scatter(k, batch.table.rows());
    for (std::size_t i = 0; i < k; ++i) {
      const double* pooled = fwd.pooled.data() + i * m;
      const int* slots = fwd.argmax_slot.data() + i * m;
      double* row = scatter.data() + i * scatter.cols();
      const double a = p.readout[i];
      for (std::size_t s = 0; s < m; ++s) {
        if (pooled[s] <= 0.0) continue;
        row[batch.patch_rows[s * n + static_cast<std::size_t>(slots[s])]] += coef[s] * a;
      }
    }
    g.filters = matmul(scatter, batch.table);
  }
  return g;
}

Vector batch_scores(const CnnParams& p, const PatchBatch& batch) {
  return forward_batch(p, batch).scores;
}

}  // namespace poolnet
