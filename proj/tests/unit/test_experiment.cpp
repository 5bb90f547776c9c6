#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "poolnet/config.hpp"
#include "poolnet/svg_plot.hpp"
#include "poolnet/sweep.hpp"

using namespace poolnet;

TEST(Config, ParseAndOverride) {
  std::stringstream in("# comment\n m = 8, 16 ,32\nrho=1.5\n\nmodels = svm\n");
  Config c = Config::parse(in);
  EXPECT_EQ(c.get_int_list("m", {}), (std::vector<long>{8, 16, 32}));
  EXPECT_DOUBLE_EQ(c.get_double("rho", 0.0), 1.5);
  c.set("rho", "2");
  EXPECT_DOUBLE_EQ(c.get_double("rho", 0.0), 2.0);
  EXPECT_EQ(c.get_int("missing", 7), 7);
  EXPECT_THROW(c.get_int("rho", 0) + c.get_int("models", 0), ParameterError);
  EXPECT_THROW(c.require_known({"m", "rho"}), ParameterError);
  EXPECT_NO_THROW(c.require_known({"m", "rho", "models"}));
}

TEST(Config, RejectsLinesWithoutEquals) {
  std::stringstream in("m 8\n");
  EXPECT_THROW(Config::parse(in), FormatError);
}

TEST(Sweep, PresetsEncodeThePaperSettings) {
  const SweepSpec a = sweep_preset("fig3a");
  EXPECT_EQ(a.d, 20);
  EXPECT_EQ(a.n_values, std::vector<int>{10});
  EXPECT_EQ(a.convpool.channels, 500);
  EXPECT_EQ(a.repeats, 5);
  EXPECT_EQ(a.test_count, 1000);
  EXPECT_EQ(a.rho_values, std::vector<double>{0.0});
  EXPECT_EQ(sweep_preset("fig3b").rho_values, std::vector<double>{1.0});
  EXPECT_EQ(sweep_preset("fig4").n_values, (std::vector<int>{5, 10, 20, 40}));
  for (const auto& name : sweep_preset_names()) EXPECT_NO_THROW(sweep_preset(name));
  EXPECT_THROW(sweep_preset("fig9"), ParameterError);
}

TEST(Sweep, ConfigOverridesPreset) {
  SweepSpec s = sweep_preset("fig3a");
  Config c;
  c.set("models", "mlp,svm");
  c.set("m", "4,6");
  c.set("repeats", "2");
  apply_sweep_config(s, c);
  EXPECT_EQ(s.models.size(), 2u);
  EXPECT_EQ(s.cell_count(), 2u * 2u * 2u);
  c.set("bogus", "1");
  EXPECT_THROW(apply_sweep_config(s, c), ParameterError);
}

TEST(Sweep, CellSeedsAreDistinctAndStable) {
  EXPECT_EQ(cell_seed(1, 8, 10, 0.0, 0), cell_seed(1, 8, 10, 0.0, 0));
  EXPECT_NE(cell_seed(1, 8, 10, 0.0, 0), cell_seed(1, 8, 10, 0.0, 1));
  EXPECT_NE(cell_seed(1, 8, 10, 0.0, 0), cell_seed(1, 16, 10, 0.0, 0));
  EXPECT_NE(cell_seed(1, 8, 10, 0.0, 0), cell_seed(1, 8, 10, 1.0, 0));
}

TEST(Sweep, SmallRunIsDeterministicAndAggregatesExactly) {
  SweepSpec s = sweep_preset("fig3a");
  s.d = 8;
  s.l = 6;
  s.n_values = {4};
  s.m_values = {8, 16};
  s.repeats = 2;
  s.test_count = 200;
  s.convpool.channels = 20;
  s.convpool.joint_steps = 100;
  s.mlp.epochs = 20;
  const SweepResult a = run_sweep(s);
  s.workers = 2;
  const SweepResult b = run_sweep(s);
  std::stringstream ra, rb;
  write_raw_csv(ra, a.rows);
  write_raw_csv(rb, b.rows);
  EXPECT_EQ(ra.str(), rb.str());
  ASSERT_EQ(a.rows.size(), 12u);
  ASSERT_EQ(a.cells.size(), 6u);

  const std::vector<SweepRow> back = read_raw_csv(ra);
  const auto again = aggregate_rows(back);
  for (std::size_t i = 0; i < again.size(); ++i) {
    EXPECT_NEAR(again[i].test_mean, a.cells[i].test_mean, 1e-12);
    EXPECT_NEAR(again[i].test_std, a.cells[i].test_std, 1e-12);
  }
  std::stringstream agg;
  write_aggregate_csv(agg, a.cells);
  const auto cells = read_aggregate_csv(agg);
  EXPECT_EQ(cells.size(), a.cells.size());
  EXPECT_EQ(cells[3].train_mean, a.cells[3].train_mean);
}

TEST(Sweep, AggregateByHand) {
  std::vector<SweepRow> rows(3);
  rows[0].test_err = 0.1;
  rows[1].test_err = 0.3;
  rows[2].test_err = std::nan("");
  rows[2].train_err = std::nan("");
  const auto cells = aggregate_rows(rows);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].runs, 2);
  EXPECT_EQ(cells[0].failures, 1);
  EXPECT_DOUBLE_EQ(cells[0].test_mean, 0.2);
  EXPECT_NEAR(cells[0].test_std, 0.1, 1e-15);
}

TEST(Sweep, FailedCellIsRecorded) {
  SweepSpec s = sweep_preset("fig3a");
  s.d = 4;
  s.l = 6;  // invalid: more patterns than dimensions
  const SweepRow row = run_cell(s, SweepModel::Svm, 8, 3, 0.0, 0);
  EXPECT_EQ(row.status.rfind("failed", 0), 0u);
  EXPECT_TRUE(std::isnan(row.test_err));
}

TEST(Plot, ConstantSeriesIsHorizontal) {
  std::vector<SweepAggregate> cells;
  for (int m : {8, 16, 32}) {
    SweepAggregate c;
    c.model = SweepModel::Mlp;
    c.m = m;
    c.n = 10;
    c.runs = 5;
    c.test_mean = 0.25;
    cells.push_back(c);
  }
  const std::string svg = render_svg(cells, {});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("m (training samples)"), std::string::npos);
  EXPECT_NE(svg.find("mlp m=16 mean=0.25"), std::string::npos);
  const auto pos = svg.find("<polyline points=\"");
  ASSERT_NE(pos, std::string::npos);
  const auto end = svg.find('"', pos + 18);
  std::stringstream pts(svg.substr(pos + 18, end - pos - 18));
  std::string first, p;
  pts >> first;
  while (pts >> p) EXPECT_EQ(p.substr(p.find(',')), first.substr(first.find(',')));
}

TEST(Plot, EmptyInputIsRejected) {
  EXPECT_THROW(render_svg({}, {}), ParameterError);
}
