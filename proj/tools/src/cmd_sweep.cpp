#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "commands.hpp"
#include "options.hpp"
#include "poolnet/errors.hpp"
#include "poolnet/svg_plot.hpp"
#include "poolnet/sweep.hpp"

namespace poolnet::cli {

Action add_sweep(CLI::App& app) {
  auto* cmd = app.add_subcommand("sweep", "Run a grid of training runs and write CSV summaries");
  auto keys = std::make_shared<KeyedOptions>(cmd);
  for (const auto& key : sweep_config_keys()) keys->add(key, "sweep setting (see README)");
  auto out = std::make_shared<std::string>();
  auto quiet = std::make_shared<bool>(false);
  cmd->add_option("--out", *out, "output directory")->required();
  cmd->add_flag("--quiet", *quiet, "no per-cell progress");

  return [keys, out, quiet] {
    const Config cfg = keys->resolve();
    SweepSpec spec = sweep_preset(cfg.get_string("preset", "fig3a"));
    apply_sweep_config(spec, cfg);
    const auto dir = ensure_dir(*out);
    const bool verbose = !*quiet;
    const SweepResult result = run_sweep(spec, [verbose](const SweepRow& r, std::size_t done,
                                                          std::size_t total) {
      if (!verbose) return;
      std::cerr << '[' << done << '/' << total << "] " << to_string(r.model) << " m=" << r.m
                << " n=" << r.n << " rho=" << r.rho << " repeat=" << r.repeat
                << " test=" << r.test_err << ' ' << r.status << '\n';
    });
    {
      std::ofstream raw(dir / "raw.csv");
      write_raw_csv(raw, result.rows);
      std::ofstream agg(dir / "aggregate.csv");
      write_aggregate_csv(agg, result.cells);
      std::ofstream tim(dir / "timings.csv");
      write_timings_csv(tim, result.rows);
    }
    write_text(dir / "manifest.json", sweep_manifest_json(spec) + "\n");
    for (const auto& c : result.cells) {
      std::cout << to_string(c.model) << " m=" << c.m << " n=" << c.n << " rho=" << c.rho
                << " test " << c.test_mean << " +- " << c.test_std << " train " << c.train_mean
                << (c.failures ? " (" + std::to_string(c.failures) + " failed)" : "") << '\n';
    }
    return int{kOk};
  };
}

Action add_plot(CLI::App& app) {
  auto* cmd = app.add_subcommand("plot", "Render a sweep CSV as an SVG line chart");
  auto csv = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto x = std::make_shared<std::string>("m");
  auto metric = std::make_shared<std::string>("test");
  auto title = std::make_shared<std::string>();
  auto linear = std::make_shared<bool>(false);
  cmd->add_option("--csv", *csv, "raw.csv or aggregate.csv from a sweep")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", *out, "SVG file")->required();
  cmd->add_option("--x", *x, "m or n")->check(CLI::IsMember({"m", "n"}));
  cmd->add_option("--metric", *metric, "test or train")->check(CLI::IsMember({"test", "train"}));
  cmd->add_option("--title", *title, "chart title");
  cmd->add_flag("--linear-x", *linear, "linear instead of log2 x axis");

  return [=] {
    std::ifstream in(*csv);
    std::string header;
    std::getline(in, header);
    in.seekg(0);
    std::vector<SweepAggregate> cells;
    if (header.rfind("model,m,n,rho,repeat,", 0) == 0) {
      cells = aggregate_rows(read_raw_csv(in));
    } else if (header.rfind("model,m,n,rho,runs,", 0) == 0) {
      cells = read_aggregate_csv(in);
    } else {
      throw FormatError("plot: " + *csv + " is not a sweep CSV");
    }
    PlotSpec spec;
    spec.x_axis = *x == "n" ? PlotAxis::PatchCount : PlotAxis::SampleSize;
    spec.metric = *metric == "train" ? PlotMetric::TrainError : PlotMetric::TestError;
    spec.log_x = !*linear;
    spec.title = title->empty() ? *metric + " error" : *title;
    const std::string svg = render_svg(cells, spec);  // throws before any file is created
    write_text(*out, svg);
    std::cout << "wrote " << *out << '\n';
    return int{kOk};
  };
}

}  // namespace poolnet::cli
