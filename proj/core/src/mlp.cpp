#include "poolnet/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poolnet/errors.hpp"

namespace poolnet {

double leaky_relu(double u, double leak) { return u > 0.0 ? u : leak * u; }

double mlp_forward(const MlpParams& p, std::span<const double> x) {
  if (x.size() != p.weights.cols()) throw DimensionError("mlp_forward: input size");
  double score = 0.0;
  for (std::size_t i = 0; i < p.weights.rows(); ++i) {
    score += p.readout[i] * leaky_relu(dot(p.weights.row(i), x), p.leak);
  }
  return score;
}

Vector mlp_scores(const MlpParams& p, const Matrix& inputs) {
  if (inputs.cols() != p.weights.cols()) throw DimensionError("mlp_scores: input size");
  const Matrix pre = matmul_nt(inputs, p.weights);
  Vector out(inputs.rows(), 0.0);
  for (std::size_t s = 0; s < pre.rows(); ++s) {
    const auto row = pre.row(s);
    double acc = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) acc += p.readout[i] * leaky_relu(row[i], p.leak);
    out[s] = acc;
  }
  return out;
}

MlpGradient mlp_gradient(const MlpParams& p, const Matrix& inputs, std::span<const int> labels,
                         LossKind kind) {
  const std::size_t m = inputs.rows();
  if (labels.size() != m) throw DimensionError("mlp_gradient: label count");
  if (m == 0) throw ParameterError("mlp_gradient: empty batch");
  if (inputs.cols() != p.weights.cols()) throw DimensionError("mlp_gradient: input size");
  const std::size_t h = p.weights.rows();
  const Matrix pre = matmul_nt(inputs, p.weights);  // m x h
  const double inv = 1.0 / static_cast<double>(m);
  MlpGradient g;
  g.readout.assign(h, 0.0);
  Matrix coef(h, m);
  for (std::size_t s = 0; s < m; ++s) {
    const auto u = pre.row(s);
    double score = 0.0;
    for (std::size_t i = 0; i < h; ++i) score += p.readout[i] * leaky_relu(u[i], p.leak);
    g.loss += loss(score, labels[s], kind) * inv;
    const double c = loss_score_derivative(score, labels[s], kind) * inv;
    for (std::size_t i = 0; i < h; ++i) {
      g.readout[i] += c * leaky_relu(u[i], p.leak);
      coef(i, s) = c * p.readout[i] * (u[i] > 0.0 ? 1.0 : p.leak);
    }
  }
  g.weights = matmul(coef, inputs);
  return g;
}

int matched_hidden_width(int channels, int d, int n) {
  const double cnn = static_cast<double>(channels) * (d + 1);
  const double per_unit = static_cast<double>(n) * d + 1;
  return std::max(1, static_cast<int>(std::lround(cnn / per_unit)));
}

MlpParams init_mlp(int hidden, int input_dim, double leak, RngStream& rng) {
  if (hidden < 1 || input_dim < 1) throw ParameterError("init_mlp: sizes must be positive");
  if (!(leak > 0.0 && leak <= 1.0)) throw ParameterError("init_mlp: leak must lie in (0, 1]");
  MlpParams p;
  p.leak = leak;
  p.weights = Matrix(static_cast<std::size_t>(hidden), static_cast<std::size_t>(input_dim));
  const double sd = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (double& v : p.weights.values()) v = sd * rng.normal();
  p.readout.resize(static_cast<std::size_t>(hidden));
  const double amp = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& v : p.readout) v = amp * rng.sign();
  return p;
}

Matrix flat_inputs(std::span<const LabeledSample> samples) {
  if (samples.empty()) return {};
  const std::size_t dim = samples.front().flat().size();
  Matrix x(samples.size(), dim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto f = samples[i].flat();
    if (f.size() != dim) throw DimensionError("flat_inputs: samples have different sizes");
    std::copy(f.begin(), f.end(), x.row(i).begin());
  }
  return x;
}

MlpRun mlp_train(const Dataset& s, const MlpConfig& cfg) {
  if (s.empty()) throw ParameterError("mlp_train: empty training set");
  if (cfg.epochs < 0 || cfg.batch_size < 0) throw ParameterError("mlp_train: bad schedule");
  const Matrix x = flat_inputs(s.samples);
  std::vector<int> y(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) y[i] = s.samples[i].label;

  RngStream rng(cfg.seed, 1);
  MlpRun run;
  run.params = init_mlp(cfg.hidden, static_cast<int>(x.cols()), cfg.leak, rng);
  MlpParams& p = run.params;
  Optimizer opt_w(cfg.optimizer, cfg.lr, p.weights.size());
  Optimizer opt_a(cfg.optimizer, cfg.lr, p.readout.size());
  RngStream order_rng(cfg.seed, 2);

  const std::size_t m = s.size();
  const std::size_t b =
      cfg.batch_size == 0 ? m : std::min(m, static_cast<std::size_t>(cfg.batch_size));
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  Matrix xb;
  std::vector<int> yb;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[order_rng.uniform_index(i)]);
    for (std::size_t start = 0; start < m; start += b) {
      const std::size_t len = std::min(b, m - start);
      xb = Matrix(len, x.cols());
      yb.resize(len);
      for (std::size_t r = 0; r < len; ++r) {
        const std::size_t src = order[start + r];
        std::copy(x.row(src).begin(), x.row(src).end(), xb.row(r).begin());
        yb[r] = y[src];
      }
      const MlpGradient g = mlp_gradient(p, xb, yb, cfg.loss);
      if (!std::isfinite(g.loss) || g.loss > 1e6) {
        throw TrainingError("mlp_train: loss diverged", epoch);
      }
      opt_w.update(p.weights.values(), g.weights.values());
      opt_a.update(p.readout, g.readout);
    }
    const Vector scores = mlp_scores(p, x);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) total += loss(scores[i], y[i], cfg.loss);
    run.epoch_loss.push_back(total / static_cast<double>(m));
    if (!std::isfinite(run.epoch_loss.back())) throw TrainingError("mlp_train: non-finite loss", epoch);
    if (cfg.loss_tolerance > 0.0 && run.epoch_loss.back() < cfg.loss_tolerance) break;
  }
  const Vector scores = mlp_scores(p, x);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (predict_label(scores[i]) != y[i]) ++wrong;
  }
  run.train_error = static_cast<double>(wrong) / static_cast<double>(m);
  return run;
}

}  // namespace poolnet
