#include "poolnet/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "poolnet/errors.hpp"

namespace poolnet {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double max_first_lr(int k, int first_steps) {
  return 1.0 / (4.0 * static_cast<double>(k) * static_cast<double>(first_steps + 1));
}

void check_loss(double value, long step, const char* what) {
  if (!std::isfinite(value)) throw TrainingError(std::string(what) + ": non-finite loss", step);
}

ArgmaxLog make_log(const std::vector<int>& filters, const Dataset& s1, int label) {
  ArgmaxLog log;
  log.filters = filters;
  for (std::size_t s = 0; s < s1.size(); ++s) {
    if (s1.samples[s].label == label) log.samples.push_back(static_cast<int>(s));
  }
  return log;
}

void record_argmax(ArgmaxLog& log, const BatchForward& fwd, const Dataset& s1) {
  std::vector<int> ids;
  ids.reserve(log.filters.size() * log.samples.size());
  for (int f : log.filters) {
    for (int s : log.samples) {
      const auto fi = static_cast<std::size_t>(f);
      const auto si = static_cast<std::size_t>(s);
      if (fwd.pooled(fi, si) > 0.0) {
        const int slot = fwd.slot(fi, si);
        ids.push_back(s1.samples[si].slot_pattern_ids[static_cast<std::size_t>(slot)]);
      } else {
        ids.push_back(-1);
      }
    }
  }
  log.steps.push_back(std::move(ids));
}

void record_step(TrainRun& run, long step, const CnnParams& p, const BatchForward& fwd,
                 const PatternSet& ps, const Dataset& s1) {
  run.telemetry_steps.push_back(step);
  double worst = 0.0;
  for (double v : fwd.scores) worst = std::max(worst, std::abs(v));
  run.max_abs_output.push_back(worst);
  if (run.config.telemetry != TelemetryLevel::Full) return;
  run.projections.push_back(pattern_projections(p.filters, ps));
  Vector norms(p.filters.rows());
  for (std::size_t i = 0; i < norms.size(); ++i) norms[i] = norm(p.filters.row(i));
  run.filter_norms.push_back(std::move(norms));
  record_argmax(run.positive_argmax, fwd, s1);
  record_argmax(run.negative_argmax, fwd, s1);
}

void validate_config(const TrainConfig& cfg) {
  if (cfg.channels < 1) throw ParameterError("train: channels must be >= 1");
  if (cfg.first_steps < 0 || cfg.second_steps < 0 || cfg.joint_steps < 0) {
    throw ParameterError("train: step counts must be non-negative");
  }
  if (!(cfg.init_radius > 0.0)) throw ParameterError("train: init radius must be positive");
  if (!(cfg.first_lr >= 0.0) || !(cfg.second_lr >= 0.0) || !(cfg.joint_lr >= 0.0)) {
    throw ParameterError("train: learning rates must be non-negative");
  }
  if (cfg.batch_size < 0) throw ParameterError("train: batch size must be non-negative");
  if (cfg.telemetry_stride < 1) throw ParameterError("train: telemetry stride must be >= 1");
}

CnnParams initialize(const TrainConfig& cfg, int d) {
  RngStream rng(cfg.seed, 1);
  return init_cnn(cfg.channels, d, cfg.init_radius, rng);
}

/// Logistic (or hinge) regression on fixed features, features stored k x m.
Vector train_readout(const Matrix& pooled, std::span<const int> labels, Vector a,
                     const TrainConfig& cfg, SecondLayerPath path, TrainRun& run) {
  const std::size_t k = pooled.rows();
  const std::size_t m = pooled.cols();
  const double inv = 1.0 / static_cast<double>(m);
  const bool dual = path == SecondLayerPath::Dual || (path == SecondLayerPath::Auto && m < k);
  Vector coef(m);

  if (dual) {
    const Matrix kernel = matmul_tn(pooled, pooled);
    const Vector base = matvec_t(pooled, a);
    Vector c(m, 0.0);
    Vector scores = base;
    for (long t = 0;; ++t) {
      const double l2 = mean_loss(scores, labels, cfg.loss);
      check_loss(l2, t, "second layer");
      run.second_loss.push_back(l2);
      if (t == cfg.second_steps) break;
      if (cfg.second_loss_tolerance > 0.0 && l2 < cfg.second_loss_tolerance) break;
      for (std::size_t s = 0; s < m; ++s) {
        c[s] -= cfg.second_lr * loss_score_derivative(scores[s], labels[s], cfg.loss) * inv;
      }
      scores = matvec(kernel, c);
      for (std::size_t s = 0; s < m; ++s) scores[s] += base[s];
      run.second_steps_run = t + 1;
    }
    const Vector delta = matvec(pooled, c);
    for (std::size_t i = 0; i < k; ++i) a[i] += delta[i];
    return a;
  }

  for (long t = 0;; ++t) {
    const Vector scores = matvec_t(pooled, a);
    const double l2 = mean_loss(scores, labels, cfg.loss);
    check_loss(l2, t, "second layer");
    run.second_loss.push_back(l2);
    if (t == cfg.second_steps) break;
    if (cfg.second_loss_tolerance > 0.0 && l2 < cfg.second_loss_tolerance) break;
    for (std::size_t s = 0; s < m; ++s) {
      coef[s] = loss_score_derivative(scores[s], labels[s], cfg.loss) * inv;
    }
    const Vector grad = matvec(pooled, coef);
    axpy(-cfg.second_lr, grad, a);
    run.second_steps_run = t + 1;
  }
  return a;
}

}  // namespace

std::string RegimeCheck::describe() const {
  std::ostringstream out;
  out << "eta1<=1/(4k(T1+1)):" << (first_lr_ok ? "ok" : "VIOLATED")
      << " r<=eta1/200:" << (radius_ok ? "ok" : "VIOLATED")
      << " eta2<8k:" << (second_lr_ok ? "ok" : "VIOLATED")
      << " k>8d^3:" << (width_ok ? "ok" : "VIOLATED");
  return out.str();
}

RegimeCheck check_regime(const TrainConfig& cfg, int d) {
  RegimeCheck c;
  const double k = static_cast<double>(cfg.channels);
  c.first_lr_ok = cfg.first_lr <= max_first_lr(cfg.channels, cfg.first_steps);
  c.radius_ok = cfg.init_radius <= cfg.first_lr / 200.0;
  c.second_lr_ok = cfg.second_lr < 8.0 * k;
  const long long dd = d;
  c.width_ok = static_cast<long long>(cfg.channels) > 8 * dd * dd * dd;
  return c;
}

TrainConfig regime_config(int d, int first_steps, std::uint64_t seed) {
  TrainConfig cfg;
  const long long dd = d;
  cfg.channels = static_cast<int>(8 * dd * dd * dd + 1);
  cfg.first_steps = first_steps;
  cfg.first_lr = max_first_lr(cfg.channels, first_steps);
  cfg.init_radius = cfg.first_lr / 200.0;
  cfg.second_lr = 4.0 * cfg.channels;
  cfg.second_steps = 100000;
  cfg.seed = seed;
  cfg.enforcement = Enforcement::Strict;
  return cfg;
}

TrainRun layerwise_train(const Dataset& s, const TrainConfig& cfg, SecondLayerPath path) {
  validate_config(cfg);
  if (!s.patterns) throw ParameterError("layerwise_train: dataset has no pattern set");
  const auto& ps = *s.patterns;
  const int d = ps.dimension();
  auto [s1, s2] = split_dataset(s);

  TrainRun run;
  run.kind = RunKind::Layerwise;
  run.config = cfg;
  run.dimension = d;
  run.patch_count = s.patch_count;
  run.regime = check_regime(cfg, d);
  if (cfg.enforcement == Enforcement::Strict && !run.regime.all()) {
    throw ParameterError("layerwise_train: regime assumptions violated: " +
                         run.regime.describe());
  }
  run.s1_size = s1.size();
  run.s2_size = s2.size();
  run.s1_positives = s1.positives();
  run.s1_negatives = s1.negatives();

  CnnParams p = initialize(cfg, d);
  run.initial = p;
  run.lucky = lucky_sets(p, ps);
  if (cfg.telemetry == TelemetryLevel::Full) {
    run.positive_argmax = make_log(run.lucky.positive, s1, 1);
    run.negative_argmax = make_log(run.lucky.negative, s1, -1);
  }

  auto start = Clock::now();
  const PatchBatch batch1 = PatchBatch::from_dataset(s1);
  for (int t = 0;; ++t) {
    const BatchForward fwd = forward_batch(p, batch1);
    const double l1 = mean_loss(fwd.scores, batch1.labels, cfg.loss);
    check_loss(l1, t, "first layer");
    run.first_loss.push_back(l1);
    record_step(run, t, p, fwd, ps, s1);
    if (t == cfg.first_steps) break;
    const CnnGradient g = batch_gradient(p, batch1, fwd, cfg.loss, true, false);
    axpy(-cfg.first_lr, g.filters.values(), p.filters.values());
  }
  run.first_seconds = seconds_since(start);

  start = Clock::now();
  const PatchBatch batch2 = PatchBatch::from_dataset(s2);
  const BatchForward fwd2 = forward_batch(p, batch2);
  p.readout = train_readout(fwd2.pooled, batch2.labels, p.readout, cfg, path, run);
  run.second_seconds = seconds_since(start);
  run.final_params = std::move(p);
  return run;
}

TrainRun joint_train(const Dataset& s, const TrainConfig& cfg) {
  validate_config(cfg);
  if (!s.patterns) throw ParameterError("joint_train: dataset has no pattern set");
  if (s.empty()) throw ParameterError("joint_train: empty training set");
  const auto& ps = *s.patterns;
  const int d = ps.dimension();

  TrainRun run;
  run.kind = RunKind::Joint;
  run.config = cfg;
  run.dimension = d;
  run.patch_count = s.patch_count;
  run.regime = check_regime(cfg, d);
  if (cfg.enforcement == Enforcement::Strict && !run.regime.all()) {
    throw ParameterError("joint_train: regime assumptions violated: " + run.regime.describe());
  }
  run.s1_size = s.size();
  run.s1_positives = s.positives();
  run.s1_negatives = s.negatives();

  CnnParams p = initialize(cfg, d);
  run.initial = p;
  run.lucky = lucky_sets(p, ps);
  if (cfg.telemetry == TelemetryLevel::Full) {
    run.positive_argmax = make_log(run.lucky.positive, s, 1);
    run.negative_argmax = make_log(run.lucky.negative, s, -1);
  }

  const auto start = Clock::now();
  const PatchBatch full = PatchBatch::from_dataset(s);
  const std::size_t m = s.size();
  const bool full_batch = cfg.batch_size == 0 || static_cast<std::size_t>(cfg.batch_size) >= m;
  Optimizer opt_w(cfg.optimizer, cfg.joint_lr, p.filters.size());
  Optimizer opt_a(cfg.optimizer, cfg.joint_lr, p.readout.size());
  RngStream order_rng(cfg.seed, 2);
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = m;

  for (long step = 0;; ++step) {
    const bool record = step % cfg.telemetry_stride == 0 || step == cfg.joint_steps;
    BatchForward fwd;
    double full_loss = -1.0;
    if (full_batch || record) {
      fwd = forward_batch(p, full);
      full_loss = mean_loss(fwd.scores, full.labels, cfg.loss);
      check_loss(full_loss, step, "joint");
      if (full_loss > 1e6) throw TrainingError("joint: loss diverged", step);
    }
    if (record) {
      run.first_loss.push_back(full_loss);
      record_step(run, step, p, fwd, ps, s);
    }
    if (step == cfg.joint_steps) break;
    if (full_loss >= 0.0 && cfg.joint_loss_tolerance > 0.0 && full_loss < cfg.joint_loss_tolerance) {
      if (!record) {
        run.first_loss.push_back(full_loss);
        record_step(run, step, p, fwd, ps, s);
      }
      break;
    }

    CnnGradient g;
    if (full_batch) {
      g = batch_gradient(p, full, fwd, cfg.loss, true, true);
    } else {
      const std::size_t b = static_cast<std::size_t>(cfg.batch_size);
      if (cursor + b > m) {
        for (std::size_t i = m; i > 1; --i) {
          std::swap(order[i - 1], order[order_rng.uniform_index(i)]);
        }
        cursor = 0;
      }
      const PatchBatch mini =
          full.select(std::span<const int>(order.data() + cursor, b));
      cursor += b;
      const BatchForward mf = forward_batch(p, mini);
      const double ml = mean_loss(mf.scores, mini.labels, cfg.loss);
      check_loss(ml, step, "joint");
      if (ml > 1e6) throw TrainingError("joint: loss diverged", step);
      g = batch_gradient(p, mini, mf, cfg.loss, true, true);
    }
    opt_w.update(p.filters.values(), g.filters.values());
    opt_a.update(p.readout, g.readout);
  }
  run.first_seconds = seconds_since(start);
  run.final_params = std::move(p);
  return run;
}

DirectionReport second_layer_direction(const TrainRun& run, const Dataset& s2) {
  if (s2.empty()) throw ParameterError("second_layer_direction: empty S2");
  const PatchBatch batch = PatchBatch::from_dataset(s2);
  const BatchForward fwd = forward_batch(run.final_params, batch);
  const Matrix kernel = matmul_tn(fwd.pooled, fwd.pooled);
  // Same unit-max-norm scaling as the primal solver.
  double max_sq = 0.0;
  for (std::size_t s = 0; s < kernel.rows(); ++s) max_sq = std::max(max_sq, kernel(s, s));
  Matrix scaled = kernel;
  if (max_sq > 0.0) {
    for (double& v : scaled.values()) v /= max_sq;
  }
  const DualSolution dual = solve_hard_margin_dual(scaled, batch.labels);
  DirectionReport rep;
  rep.status = dual.status;
  if (!rep.separable()) return rep;
  Vector coef(dual.alpha.size());
  for (std::size_t s = 0; s < coef.size(); ++s) coef[s] = dual.alpha[s] * batch.labels[s] / max_sq;
  rep.max_margin_direction = matvec(fwd.pooled, coef);
  rep.max_margin_norm_sq = squared_norm(rep.max_margin_direction);
  rep.cosine = cosine_similarity(run.final_params.readout, rep.max_margin_direction);
  return rep;
}

double train_error(const CnnParams& p, const Dataset& s) {
  if (s.empty()) throw ParameterError("train_error: empty dataset");
  const Vector scores = batch_scores(p, PatchBatch::from_dataset(s));
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (predict_label(scores[i]) != s.samples[i].label) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(s.size());
}

}  // namespace poolnet
