#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "poolnet/checkpoint.hpp"
#include "poolnet/cnn.hpp"
#include "poolnet/optimizer.hpp"

using namespace poolnet;

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  const std::size_t cols = r.begin()->size();
  Matrix m(r.size(), cols);
  std::size_t i = 0;
  for (const auto& row : r) std::copy(row.begin(), row.end(), m.row(i++).begin());
  return m;
}

std::vector<LabeledSample> random_samples(int count, int n, int d, RngStream& rng) {
  std::vector<LabeledSample> out;
  for (int s = 0; s < count; ++s) {
    LabeledSample x;
    x.patches = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
    for (double& v : x.patches.values()) v = rng.normal();
    x.label = rng.sign();
    x.slot_pattern_ids.assign(static_cast<std::size_t>(n), -1);
    out.push_back(std::move(x));
  }
  return out;
}

// Smallest distance of any pre-activation from 0 or from the runner-up
// response of its filter, and of y N(x) from the hinge kink.
double smoothness_gap(const CnnParams& p, const std::vector<LabeledSample>& batch) {
  double gap = 1e300;
  for (const auto& s : batch) {
    for (std::size_t i = 0; i < p.filters.rows(); ++i) {
      std::vector<double> r;
      for (std::size_t j = 0; j < s.patches.rows(); ++j) {
        r.push_back(dot(p.filters.row(i), s.patches.row(j)));
      }
      std::sort(r.begin(), r.end());
      for (double v : r) gap = std::min(gap, std::abs(v));
      gap = std::min(gap, r.back() - r[r.size() - 2]);
    }
    gap = std::min(gap, std::abs(1.0 - s.label * cnn_score(p, s.patches)));
  }
  return gap;
}

double rel_err(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max({den, std::abs(a[i]), std::abs(b[i])});
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace

TEST(Cnn, HandComputedForward) {
  CnnParams p;
  p.filters = rows({{1.0, 0.0}, {0.0, -1.0}, {1.0, 1.0}});
  p.readout = {2.0, -1.0, 0.5};
  const Matrix x = rows({{0.5, 2.0}, {3.0, -1.0}});
  const CnnForward f = cnn_forward(p, x);
  // filter 0: responses 0.5, 3 -> 3 at slot 1; filter 1: -2, 1 -> 1 at slot 1;
  // filter 2: 2.5, 2 -> 2.5 at slot 0.
  EXPECT_EQ(f.trace.argmax_slot, (std::vector<int>{1, 1, 0}));
  EXPECT_EQ(f.trace.pooled, (Vector{3.0, 1.0, 2.5}));
  EXPECT_DOUBLE_EQ(f.score, 2.0 * 3.0 - 1.0 + 0.5 * 2.5);
}

TEST(Cnn, TiesPickLowestSlotAndZeroIsInactive) {
  CnnParams p;
  p.filters = rows({{1.0, 0.0}, {0.0, 1.0}});
  p.readout = {1.0, 1.0};
  const Matrix x = rows({{2.0, 0.0}, {2.0, -3.0}, {-1.0, 0.0}});
  const CnnForward f = cnn_forward(p, x);
  EXPECT_EQ(f.trace.argmax_slot[0], 0);
  EXPECT_EQ(f.trace.active[0], 1);
  EXPECT_EQ(f.trace.argmax_slot[1], 0);
  EXPECT_EQ(f.trace.active[1], 0);
  EXPECT_EQ(f.trace.pooled[1], 0.0);
  EXPECT_EQ(predict_label(0.0), -1);
}

TEST(Cnn, FilterEqualToPositivePatternScoresOne) {
  RngStream r(1);
  auto ps = std::make_shared<const PatternSet>(PatternSet::sample(6, 5, r));
  CnnParams p;
  p.filters = Matrix(1, 6);
  std::copy(ps->pattern(kPositivePattern).begin(), ps->pattern(kPositivePattern).end(),
            p.filters.row(0).begin());
  p.readout = {1.0};
  for (int t = 0; t < 50; ++t) {
    const LabeledSample s = sample_labeled(*ps, 4, r);
    EXPECT_NEAR(cnn_score(p, s.patches), s.label > 0 ? 1.0 : 0.0, 1e-12);
  }
}

TEST(Cnn, InitSphereAndSigns) {
  RngStream r(2);
  const CnnParams p = init_cnn(50, 7, 0.01, r);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_NEAR(norm(p.filters.row(i)), 0.01, 1e-15);
    EXPECT_TRUE(p.readout[i] == 1.0 || p.readout[i] == -1.0);
  }
  EXPECT_THROW(init_cnn(0, 7, 0.01, r), ParameterError);
}

TEST(Cnn, BatchEngineMatchesReference) {
  RngStream r(3);
  for (double rho : {0.0, 0.4}) {
    auto ps = std::make_shared<const PatternSet>(PatternSet::sample(8, 6, r));
    const Dataset ds = sample_dataset(ps, 5, 40, r, rho);
    const CnnParams p = init_cnn(30, 8, 1.0, r);
    const PatchBatch b = PatchBatch::from_samples(ds.samples, ps.get());
    const BatchForward fwd = forward_batch(p, b);
    for (LossKind kind : {LossKind::Logistic, LossKind::Hinge}) {
      const CnnGradient g = batch_gradient(p, b, fwd, kind, true, true);
      EXPECT_LE(max_abs_diff(g.filters.values(), grad_filters(p, ds.samples, kind).values()), 1e-14);
      EXPECT_LE(max_abs_diff(g.readout, grad_readout(p, ds.samples, kind)), 1e-14);
    }
    for (std::size_t s = 0; s < ds.size(); ++s) {
      const CnnForward ref = cnn_forward(p, ds.samples[s].patches);
      EXPECT_NEAR(fwd.scores[s], ref.score, 1e-13);
      for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(fwd.slot(i, s), ref.trace.argmax_slot[i]);
    }
  }
}

TEST(Cnn, GradientsMatchFiniteDifferences) {
  RngStream r(4);
  int checked = 0;
  for (int trial = 0; checked < 20 && trial < 500; ++trial) {
    CnnParams p = init_cnn(4, 3, 1.0, r);
    for (double& a : p.readout) a *= 0.3 + r.uniform();
    const auto batch = random_samples(3, 3, 3, r);
    if (smoothness_gap(p, batch) < 1e-3) continue;
    ++checked;
    for (LossKind kind : {LossKind::Logistic, LossKind::Hinge}) {
      auto loss_w = [&](std::span<const double> w) {
        CnnParams q = p;
        std::copy(w.begin(), w.end(), q.filters.values().begin());
        double total = 0.0;
        for (const auto& s : batch) total += loss(cnn_score(q, s.patches), s.label, kind);
        return total / static_cast<double>(batch.size());
      };
      auto loss_a = [&](std::span<const double> a) {
        CnnParams q = p;
        std::copy(a.begin(), a.end(), q.readout.begin());
        double total = 0.0;
        for (const auto& s : batch) total += loss(cnn_score(q, s.patches), s.label, kind);
        return total / static_cast<double>(batch.size());
      };
      const Vector fw = finite_diff_grad(loss_w, p.filters.values(), 1e-6);
      const Vector fa = finite_diff_grad(loss_a, p.readout, 1e-6);
      EXPECT_LE(rel_err(grad_filters(p, batch, kind).values(), fw), 1e-5);
      EXPECT_LE(rel_err(grad_readout(p, batch, kind), fa), 1e-5);
    }
  }
  EXPECT_EQ(checked, 20);
}

TEST(Cnn, ValidateRejectsMismatch) {
  CnnParams p;
  p.filters = Matrix(3, 2);
  p.readout = {1.0};
  EXPECT_THROW(p.validate(), DimensionError);
}

TEST(Checkpoint, RoundTrip) {
  RngStream r(5);
  const CnnParams p = init_cnn(7, 4, 0.3, r);
  std::stringstream ss;
  write_cnn(ss, p);
  const CnnParams q = read_cnn(ss);
  EXPECT_EQ(q.filters, p.filters);
  EXPECT_EQ(q.readout, p.readout);
  std::stringstream bad("poolnet-cnn 1\nk 2\nd 2\nfilters\n1 2\n");
  EXPECT_THROW(read_cnn(bad), FormatError);
}

TEST(Optimizer, GradientDescentStep) {
  Optimizer opt(OptimizerKind::GradientDescent, 0.5, 2);
  Vector x{1.0, 1.0};
  opt.update(x, Vector{2.0, -4.0});
  EXPECT_EQ(x, (Vector{0.0, 3.0}));
}

TEST(Optimizer, AdamFirstStepIsSignTimesRate) {
  // With bias correction, m_hat = g and v_hat = g^2 after one step.
  Optimizer opt(OptimizerKind::Adam, 0.01, 3);
  Vector x{0.0, 0.0, 0.0};
  opt.update(x, Vector{3.0, -0.5, 0.0});
  EXPECT_NEAR(x[0], -0.01 * 3.0 / (3.0 + 1e-8), 1e-15);
  EXPECT_NEAR(x[1], 0.01 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_EQ(x[2], 0.0);
  EXPECT_THROW(parse_optimizer_kind("sgdm"), ParameterError);
}
