#include <gtest/gtest.h>

#include <sstream>

#include "poolnet/theory.hpp"
#include "poolnet/vc.hpp"

using namespace poolnet;

TEST(Census, LuckyProbabilityFormula) {
  EXPECT_DOUBLE_EQ(lucky_probability(2), 0.25);
  EXPECT_DOUBLE_EQ(lucky_probability(3), 0.75 / 4.0);
  EXPECT_NEAR(lucky_probability(10), (1.0 - 1.0 / 512.0) / 18.0, 1e-15);
}

TEST(Census, HandBuiltFilters) {
  RngStream r(1);
  const PatternSet ps = PatternSet::sample(4, 3, r, OrthoMode::StandardBasis);
  CnnParams p;
  p.filters = Matrix(4, 4, {1.0, 0.0, 0.0, 0.0,   // positive, a = +1 -> lucky
                            0.0, 1.0, 0.0, 0.0,   // negative, a = -1 -> lucky
                            1.0, 0.0, 0.0, 0.0,   // positive but a = -1
                            0.5, 0.0, 0.9, 0.0}); // spurious wins
  p.readout = {1.0, -1.0, -1.0, 1.0};
  const LuckySets lucky = lucky_sets(p, ps);
  EXPECT_EQ(lucky.positive, std::vector<int>{0});
  EXPECT_EQ(lucky.negative, std::vector<int>{1});
  const CensusReport c = lucky_census(p, ps);
  EXPECT_EQ(c.positive, 1u);
  EXPECT_DOUBLE_EQ(c.lower, 4.0 / 16.0);
  EXPECT_DOUBLE_EQ(c.upper, 1.0);
  EXPECT_TRUE(c.verdict);
}

TEST(Census, EmpiricalRateNearFormula) {
  RngStream r(2);
  const int d = 6, k = 40000;
  const PatternSet ps = PatternSet::sample(d, d, r);
  const CnnParams p = init_cnn(k, d, 1.0, r);
  const CensusReport c = lucky_census(p, ps);
  EXPECT_NEAR(static_cast<double>(c.positive) / k, lucky_probability(d), 0.006);
  EXPECT_NEAR(static_cast<double>(c.negative) / k, lucky_probability(d), 0.006);
}

TEST(Dynamics, SmallRegimeRunIsClean) {
  RngStream r(3);
  auto ps = std::make_shared<const PatternSet>(PatternSet::sample(4, 4, r));
  const Dataset ds = sample_dataset(ps, 3, 60, r);
  TrainConfig c = regime_config(4, 20, 3);
  c.second_steps = 100;
  const TrainRun run = layerwise_train(ds, c);
  const DynamicsReport rep = dynamics_audit(run, *ps);
  EXPECT_TRUE(rep.in_regime);
  EXPECT_TRUE(rep.clean());
  ASSERT_EQ(rep.bounds.size(), static_cast<std::size_t>(kBoundKinds));
  for (const auto& b : rep.bounds) {
    EXPECT_TRUE(b.recorded);
    EXPECT_GT(b.checks, 0) << to_string(b.bound);
  }
}

TEST(Dynamics, DetectsInjectedViolation) {
  RngStream r(4);
  auto ps = std::make_shared<const PatternSet>(PatternSet::sample(4, 4, r));
  const Dataset ds = sample_dataset(ps, 3, 60, r);
  TrainConfig c = regime_config(4, 10, 4);
  c.second_steps = 10;
  TrainRun run = layerwise_train(ds, c);
  // Blow up one filter norm at the last recorded step.
  run.filter_norms.back()[0] = 1.0;
  const DynamicsReport rep = dynamics_audit(run, *ps);
  EXPECT_FALSE(rep.clean());
  EXPECT_GE(rep.summary(BoundKind::FilterNorm).violations, 1);
  ASSERT_FALSE(rep.violations.empty());
  EXPECT_LT(rep.violations.front().slack, 0.0);
}

TEST(Vstar, EntriesAndCertificate) {
  LuckySets lucky;
  lucky.positive = {0, 2};
  lucky.negative = {3};
  const Vector v = construct_vstar(lucky, 0.01, 10, 5, 4);
  const double e = 80.0 * 5 / (4 * 0.01 * 10);
  EXPECT_EQ(v, (Vector{e, 0.0, e, -e}));
  EXPECT_TRUE(construct_vstar(LuckySets{{0}, {}}, 0.01, 10, 5, 4).empty());

  RngStream r(5);
  auto ps = std::make_shared<const PatternSet>(PatternSet::sample(4, 4, r));
  const Dataset ds = sample_dataset(ps, 3, 60, r);
  TrainConfig c = regime_config(4, 20, 5);
  c.second_steps = 10;
  const TrainRun run = layerwise_train(ds, c);
  const VstarReport rep = vstar_report(run, *ps, 300, r);
  ASSERT_TRUE(rep.constructible);
  EXPECT_TRUE(rep.margin_ok());
  EXPECT_TRUE(rep.product_ok());
  EXPECT_LE(rep.vstar_norm_sq, rep.vstar_norm_bound * (1 + 1e-12));
  EXPECT_LE(rep.max_z_norm_sq, rep.z_norm_bound);

  std::stringstream txt, csv;
  TheoryReport tr;
  tr.vstar = rep;
  write_theory_text(txt, tr);
  write_theory_csv(csv, tr);
  EXPECT_NE(txt.str().find("vstar"), std::string::npos);
  EXPECT_EQ(csv.str().rfind("section,check,observed,limit,slack,checks,violations,passed", 0), 0u);
}

TEST(Vc, ClosedFormSolvesLinearSystem) {
  RngStream r(6);
  for (int count : {2, 4, 8, 64, 512}) {
    std::vector<int> y(static_cast<std::size_t>(count));
    for (int& v : y) v = r.sign();
    const Vector alpha = vc_solve_alpha(y);
    EXPECT_LE(vc_residual(alpha, y), 1e-9);
  }
  EXPECT_THROW(vc_solve_alpha(std::vector<int>{1, 1, 1}), ParameterError);
}

TEST(Vc, HandExampleTwoPoints) {
  // N = 2: each point only activates its own detector, so alpha = y.
  const std::vector<int> y{1, -1};
  const Vector alpha = vc_solve_alpha(y);
  EXPECT_DOUBLE_EQ(alpha[0], 1.0);
  EXPECT_DOUBLE_EQ(alpha[1], -1.0);
}

TEST(Vc, ShattersFourPoints) {
  RngStream r(7);
  const PatternSet ps = PatternSet::sample(6, 6, r);
  for (unsigned t = 0; t < 16; ++t) {
    std::vector<int> y(4);
    for (unsigned i = 0; i < 4; ++i) y[i] = ((t >> i) & 1U) ? 1 : -1;
    const ShatterInstance inst = vc_build_and_verify(y, ps);
    EXPECT_TRUE(inst.exact) << "labeling " << t;
    EXPECT_LE(inst.max_abs_error, 1e-6);
    EXPECT_EQ(inst.network.channels(), 8);
  }
  const PatternSet wrong = PatternSet::sample(8, 6, r);
  EXPECT_THROW(vc_build_and_verify(std::vector<int>{1, 1, 1, 1}, wrong), ParameterError);
}

TEST(Vc, PointsUseDisjointSpuriousPairs) {
  RngStream r(8);
  const PatternSet ps = PatternSet::sample(8, 8, r, OrthoMode::StandardBasis);
  const auto pts = vc_points(ps, 4, true);
  ASSERT_EQ(pts.size(), 8u);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int j = 0; j < 3; ++j) {
      const int id = pts[i].slot_pattern_ids[static_cast<std::size_t>(j)];
      EXPECT_EQ(id, ((i >> j) & 1U) ? 2 * j + 2 : 2 * j + 3);
    }
    EXPECT_EQ(pts[i].slot_pattern_ids[3], kPositivePattern);
  }
}
