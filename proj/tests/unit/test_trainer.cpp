#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "poolnet/telemetry_io.hpp"
#include "poolnet/trainer.hpp"

using namespace poolnet;

namespace {

Dataset small_data(int d, int l, int n, int m, std::uint64_t seed, double rho = 0.0) {
  RngStream r(seed);
  auto ps = std::make_shared<const PatternSet>(PatternSet::sample(d, l, r));
  return sample_dataset(ps, n, m, r, rho);
}

}  // namespace

TEST(Regime, ConfigValues) {
  const TrainConfig c = regime_config(10, 50, 3);
  EXPECT_EQ(c.channels, 8001);
  EXPECT_DOUBLE_EQ(c.first_lr, 1.0 / (4.0 * 8001 * 51));
  EXPECT_DOUBLE_EQ(c.init_radius, c.first_lr / 200.0);
  EXPECT_DOUBLE_EQ(c.second_lr, 4.0 * 8001);
  EXPECT_TRUE(check_regime(c, 10).all());
}

TEST(Regime, EachConditionChecked) {
  const TrainConfig base = regime_config(4, 10, 1);
  TrainConfig c = base;
  c.first_lr *= 1.01;
  EXPECT_FALSE(check_regime(c, 4).first_lr_ok);
  c = base;
  c.init_radius *= 1.01;
  EXPECT_FALSE(check_regime(c, 4).radius_ok);
  c = base;
  c.second_lr = 8.0 * c.channels;
  EXPECT_FALSE(check_regime(c, 4).second_lr_ok);
  c = base;
  c.channels = 8 * 64;
  const RegimeCheck rc = check_regime(c, 4);
  EXPECT_FALSE(rc.width_ok);
  EXPECT_NE(rc.describe().find("k>8d^3:VIOLATED"), std::string::npos);
}

TEST(Layerwise, StrictModeRejectsViolations) {
  const Dataset ds = small_data(4, 4, 3, 20, 1);
  TrainConfig c = regime_config(4, 5, 1);
  c.channels = 100;
  c.enforcement = Enforcement::Strict;
  EXPECT_THROW(layerwise_train(ds, c), ParameterError);
  c.enforcement = Enforcement::Warn;
  c.second_steps = 10;
  EXPECT_NO_THROW(layerwise_train(ds, c));
}

TEST(Layerwise, DualAndPrimalSecondLayerAgree) {
  const Dataset ds = small_data(4, 4, 3, 40, 2);
  TrainConfig c = regime_config(4, 10, 2);
  c.second_steps = 3000;
  const TrainRun primal = layerwise_train(ds, c, SecondLayerPath::Primal);
  const TrainRun dual = layerwise_train(ds, c, SecondLayerPath::Dual);
  const double scale = norm(primal.final_params.readout);
  EXPECT_LE(max_abs_diff(primal.final_params.readout, dual.final_params.readout), 1e-9 * scale);
  EXPECT_NEAR(primal.second_loss.back(), dual.second_loss.back(), 1e-12);
  EXPECT_EQ(primal.final_params.filters, dual.final_params.filters);
}

TEST(Layerwise, DeterministicAndRecordsTelemetry) {
  const Dataset ds = small_data(4, 4, 3, 30, 3);
  TrainConfig c = regime_config(4, 8, 9);
  c.second_steps = 200;
  const TrainRun a = layerwise_train(ds, c);
  const TrainRun b = layerwise_train(ds, c);
  EXPECT_EQ(a.final_params.filters, b.final_params.filters);
  EXPECT_EQ(a.final_params.readout, b.final_params.readout);
  EXPECT_EQ(a.first_loss.size(), 9u);
  EXPECT_EQ(a.projections.size(), 9u);
  EXPECT_EQ(a.second_loss.size(), 201u);
  EXPECT_EQ(a.s1_size + a.s2_size, 30u);
}

TEST(Layerwise, SecondLayerLossTolerance) {
  const Dataset ds = small_data(4, 4, 3, 30, 4);
  TrainConfig c = regime_config(4, 10, 4);
  c.second_steps = 1000000;
  c.second_loss_tolerance = 0.05;
  const TrainRun run = layerwise_train(ds, c);
  EXPECT_LT(run.second_steps_run, 1000000);
  EXPECT_LT(run.second_loss.back(), 0.05);
}

TEST(Joint, AdamDrivesLossDown) {
  const Dataset ds = small_data(8, 6, 4, 40, 5);
  TrainConfig c;
  c.channels = 40;
  c.init_radius = 0.01;
  c.joint_steps = 400;
  c.joint_lr = 0.01;
  c.seed = 5;
  c.telemetry = TelemetryLevel::Summary;
  const TrainRun run = joint_train(ds, c);
  EXPECT_LT(run.first_loss.back(), 0.1 * run.first_loss.front());
  EXPECT_EQ(train_error(run.final_params, ds), 0.0);
}

TEST(Joint, MiniBatchGradientDescent) {
  const Dataset ds = small_data(8, 6, 4, 40, 6, 0.3);
  TrainConfig c;
  c.channels = 30;
  c.init_radius = 0.1;
  c.optimizer = OptimizerKind::GradientDescent;
  c.joint_lr = 0.5;
  c.joint_steps = 300;
  c.batch_size = 8;
  c.seed = 6;
  const TrainRun a = joint_train(ds, c);
  const TrainRun b = joint_train(ds, c);
  EXPECT_EQ(a.final_params.filters, b.final_params.filters);
  EXPECT_LT(a.first_loss.back(), a.first_loss.front());
}

TEST(Direction, ConvergesTowardsMaxMargin) {
  const Dataset ds = small_data(4, 4, 3, 40, 7);
  TrainConfig c = regime_config(4, 10, 7);
  c.second_steps = 20000;
  const TrainRun run = layerwise_train(ds, c);
  const auto halves = split_dataset(ds);
  const DirectionReport rep = second_layer_direction(run, halves.second);
  ASSERT_TRUE(rep.separable());
  EXPECT_GT(rep.cosine, 0.9);
}

TEST(Telemetry, CsvAndManifest) {
  const Dataset ds = small_data(4, 4, 3, 20, 8);
  TrainConfig c = regime_config(4, 3, 8);
  c.second_steps = 5;
  const TrainRun run = layerwise_train(ds, c);
  std::stringstream ss;
  write_telemetry_csv(ss, run, ProjectionRows::None);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "step,layer,loss,filter,pattern,projection");
  int lines = 0;
  for (std::string line; std::getline(ss, line);) ++lines;
  EXPECT_EQ(lines, 4 + 6);
  const auto j = nlohmann::json::parse(run_manifest_json(run));
  EXPECT_EQ(j["kind"], "layerwise");
  EXPECT_EQ(j["config"]["channels"], 513);
  EXPECT_TRUE(j["regime"]["all"].get<bool>());
}
