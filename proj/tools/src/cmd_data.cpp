#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "json.hpp"
#include "options.hpp"
#include "poolnet/checkpoint.hpp"
#include "poolnet/dataset_io.hpp"
#include "poolnet/errors.hpp"
#include "poolnet/telemetry_io.hpp"
#include "poolnet/theory.hpp"

namespace poolnet::cli {

namespace {

struct DataSettings {
  int d = 20, n = 10, l = 20, m = 100;
  double rho = 0.0;
  std::uint64_t seed = 1;
  OrthoMode mode = OrthoMode::Haar;
};

DataSettings read_data_settings(const Config& cfg, DataSettings def) {
  def.d = static_cast<int>(cfg.get_int("d", def.d));
  def.n = static_cast<int>(cfg.get_int("n", def.n));
  def.l = static_cast<int>(cfg.get_int("l", cfg.has("d") && !cfg.has("l") ? def.d : def.l));
  def.m = static_cast<int>(cfg.get_int("m", def.m));
  def.rho = cfg.get_double("rho", def.rho);
  def.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long>(def.seed)));
  def.mode = parse_mode(cfg.get_string("mode", def.mode == OrthoMode::Haar ? "haar" : "standard"));
  if (def.n < 1 || def.m < 1) throw ParameterError("n and m must be positive");
  return def;
}

// Stream 1 draws the dictionary and stream 2 the samples, as in sweeps.
Dataset generate(const DataSettings& s) {
  RngStream root(s.seed);
  RngStream ps_rng = root.split(1);
  auto ps = std::make_shared<const PatternSet>(PatternSet::sample(s.d, s.l, ps_rng, s.mode));
  RngStream data_rng = root.split(2);
  return sample_dataset(ps, s.n, s.m, data_rng, s.rho);
}

nlohmann::ordered_json data_json(const DataSettings& s) {
  return {{"d", s.d}, {"n", s.n}, {"l", s.l}, {"m", s.m}, {"rho", s.rho}, {"seed", s.seed},
          {"mode", s.mode == OrthoMode::Haar ? "haar" : "standard"}};
}

void add_data_keys(KeyedOptions& keys) {
  keys.add("d", "pattern dimension");
  keys.add("n", "patches per input");
  keys.add("l", "number of patterns (defaults to d)");
  keys.add("m", "training samples");
  keys.add("rho", "noise radius per patch");
  keys.add("seed", "base seed");
  keys.add("mode", "haar or standard pattern dictionary");
}

}  // namespace

Action add_generate(CLI::App& app) {
  auto* cmd = app.add_subcommand("generate", "Sample a pattern-detection dataset");
  auto keys = std::make_shared<KeyedOptions>(cmd);
  add_data_keys(*keys);
  auto out = std::make_shared<std::string>();
  cmd->add_option("--out", *out, "dataset file")->required();
  return [keys, out] {
    const DataSettings s = read_data_settings(keys->resolve(), {});
    const Dataset ds = generate(s);
    save_dataset(*out, ds);
    std::cout << "wrote " << ds.size() << " samples (" << ds.positives() << " positive) to "
              << *out << '\n';
    return int{kOk};
  };
}

Action add_train(CLI::App& app) {
  auto* cmd = app.add_subcommand("train", "Train a max-pooling network");
  auto keys = std::make_shared<KeyedOptions>(cmd);
  keys->add("preset", "joint (default), layerwise or thm51");
  keys->add("data", "dataset file; otherwise one is generated");
  add_data_keys(*keys);
  keys->add("channels", "number of filters k");
  keys->add("t1", "layerwise: first-layer steps");
  keys->add("t2", "layerwise: second-layer steps");
  keys->add("lr1", "layerwise: first-layer step size");
  keys->add("lr2", "layerwise: second-layer step size");
  keys->add("radius", "filter initialization radius");
  keys->add("steps", "joint: optimizer steps");
  keys->add("lr", "joint: learning rate");
  keys->add("optimizer", "joint: adam or gd");
  keys->add("batch-size", "joint: mini-batch size (0 = full batch)");
  keys->add("tolerance", "stop once the training loss falls below this value");
  keys->add("loss", "logistic or hinge");
  keys->add("enforcement", "strict or warn on regime violations");
  keys->add("telemetry", "projection rows in telemetry.csv: all, lucky or none");
  auto out = std::make_shared<std::string>();
  cmd->add_option("--out", *out, "output directory")->required();

  return [keys, out] {
    const Config cfg = keys->resolve();
    const std::string preset = cfg.get_string("preset", "joint");
    const bool theorem = preset == "thm51";
    if (preset != "joint" && preset != "layerwise" && !theorem) {
      throw ParameterError("unknown train preset '" + preset + "'");
    }
    DataSettings def;
    if (theorem) def = {10, 5, 10, 400, 0.0, 1, OrthoMode::Haar};
    const DataSettings ds_settings = read_data_settings(cfg, def);
    const Dataset ds = cfg.has("data") ? load_dataset(cfg.get_string("data", "")) : generate(ds_settings);
    const int d = ds.patterns->dimension();

    TrainConfig tc;
    if (theorem) {
      tc = regime_config(d, static_cast<int>(cfg.get_int("t1", 50)), ds_settings.seed);
      tc.enforcement = Enforcement::Strict;
    } else {
      tc.seed = ds_settings.seed;
      tc.init_radius = preset == "joint" ? 1e-2 : tc.init_radius;
      tc.joint_loss_tolerance = 1e-3;
    }
    tc.channels = static_cast<int>(cfg.get_int("channels", tc.channels));
    tc.first_steps = static_cast<int>(cfg.get_int("t1", tc.first_steps));
    tc.second_steps = cfg.get_int("t2", tc.second_steps);
    tc.first_lr = cfg.get_double("lr1", tc.first_lr);
    tc.second_lr = cfg.get_double("lr2", tc.second_lr);
    tc.init_radius = cfg.get_double("radius", tc.init_radius);
    tc.joint_steps = cfg.get_int("steps", tc.joint_steps);
    tc.joint_lr = cfg.get_double("lr", tc.joint_lr);
    if (auto v = cfg.get("optimizer")) tc.optimizer = parse_optimizer_kind(*v);
    tc.batch_size = static_cast<int>(cfg.get_int("batch-size", tc.batch_size));
    if (auto v = cfg.get("loss")) tc.loss = parse_loss_kind(*v);
    if (auto v = cfg.get("enforcement")) {
      if (*v == "strict") tc.enforcement = Enforcement::Strict;
      else if (*v == "warn") tc.enforcement = Enforcement::Warn;
      else throw ParameterError("enforcement must be strict or warn");
    }
    if (cfg.has("tolerance")) {
      tc.joint_loss_tolerance = cfg.get_double("tolerance", 0.0);
      tc.second_loss_tolerance = tc.joint_loss_tolerance;
    }
    const std::string telemetry = cfg.get_string("telemetry", tc.channels > 1000 ? "lucky" : "all");
    ProjectionRows rows = ProjectionRows::All;
    if (telemetry == "lucky") rows = ProjectionRows::Lucky;
    else if (telemetry == "none") rows = ProjectionRows::None;
    else if (telemetry != "all") throw ParameterError("telemetry must be all, lucky or none");

    const bool layerwise = preset != "joint";
    if (!layerwise) tc.telemetry = TelemetryLevel::Summary;
    const TrainRun run = layerwise ? layerwise_train(ds, tc) : joint_train(ds, tc);
    if (!run.regime.all() && layerwise) {
      std::cerr << "warning: outside the theorem regime: " << run.regime.describe() << '\n';
    }

    const auto dir = ensure_dir(*out);
    save_cnn(dir / "model.txt", run.final_params);
    save_dataset(dir / "data.txt", ds);
    {
      std::ofstream tel(dir / "telemetry.csv");
      write_telemetry_csv(tel, run, rows);
    }
    nlohmann::ordered_json manifest;
    manifest["command"] = "train";
    manifest["preset"] = preset;
    if (cfg.has("data")) manifest["data_file"] = cfg.get_string("data", "");
    else manifest["data"] = data_json(ds_settings);
    manifest["run"] = nlohmann::ordered_json::parse(run_manifest_json(run));
    const double err = train_error(run.final_params, ds);
    manifest["train_error"] = err;
    std::cout << "train error " << err << ", final loss "
              << (run.second_loss.empty() ? run.first_loss.back() : run.second_loss.back())
              << '\n';

    int code = kOk;
    if (layerwise) {
      TheoryReport report;
      report.census = lucky_census(run.initial, *ds.patterns);
      report.dynamics = dynamics_audit(run, *ds.patterns);
      RngStream vrng(derive_seed(tc.seed, {0x76737472ULL}));
      report.vstar = vstar_report(run, *ds.patterns, 1000, vrng);
      std::ofstream txt(dir / "theory.txt");
      write_theory_text(txt, report);
      std::ofstream csv(dir / "theory.csv");
      write_theory_csv(csv, report);
      write_theory_text(std::cout, report);
      manifest["dynamics_violations"] = report.dynamics->total_violations;
      if (theorem && (!report.dynamics->clean() || !report.vstar->margin_ok() ||
                      !report.vstar->product_ok())) {
        code = kCheckFailed;
      }
    }
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "outputs in " << dir.string() << '\n';
    return code;
  };
}

Action add_audit(CLI::App& app) {
  auto* cmd = app.add_subcommand("audit", "Lucky-set census or dynamics audit over seeds");
  auto keys = std::make_shared<KeyedOptions>(cmd);
  add_data_keys(*keys);
  keys->add("t1", "first-layer steps");
  keys->add("channels", "census: number of filters (default 8 d^3 + 1)");
  keys->add("seeds", "number of seeds, starting at --seed");
  keys->add("min-pass", "census: fraction of seeds that must pass (default 0.95)");
  auto census = std::make_shared<bool>(false);
  cmd->add_flag("--census", *census, "only count lucky filters at initialization");

  return [keys, census] {
    const Config cfg = keys->resolve();
    const DataSettings base = read_data_settings(cfg, {10, 5, 10, 400, 0.0, 1, OrthoMode::Haar});
    const int seeds = static_cast<int>(cfg.get_int("seeds", *census ? 20 : 1));
    if (seeds < 1) throw ParameterError("seeds must be >= 1");
    int passed = 0;
    for (int i = 0; i < seeds; ++i) {
      DataSettings s = base;
      s.seed = base.seed + static_cast<std::uint64_t>(i);
      if (*census) {
        const long k = cfg.get_int("channels", 8L * s.d * s.d * s.d + 1);
        RngStream root(s.seed);
        RngStream ps_rng = root.split(1);
        const PatternSet ps = PatternSet::sample(s.d, s.l, ps_rng, s.mode);
        RngStream init_rng(s.seed, 1);
        const CnnParams p0 = init_cnn(static_cast<int>(k), s.d, 1.0, init_rng);
        const CensusReport r = lucky_census(p0, ps);
        std::cout << "seed " << s.seed << ": positive " << r.positive << ", negative "
                  << r.negative << " in [" << r.lower << ", " << r.upper << "] "
                  << (r.verdict ? "pass" : "FAIL") << '\n';
        passed += r.verdict;
        continue;
      }
      const Dataset ds = generate(s);
      const TrainConfig tc = regime_config(s.d, static_cast<int>(cfg.get_int("t1", 50)), s.seed);
      const TrainRun run = layerwise_train(ds, tc);
      TheoryReport report;
      report.dynamics = dynamics_audit(run, *ds.patterns);
      RngStream vrng(derive_seed(s.seed, {0x76737472ULL}));
      report.vstar = vstar_report(run, *ds.patterns, 1000, vrng);
      const bool ok = report.dynamics->clean() && report.vstar->margin_ok() &&
                      report.vstar->product_ok();
      std::cout << "seed " << s.seed << ": " << report.dynamics->total_violations
                << " violations, v* margin " << report.vstar->min_margin << " "
                << (ok ? "pass" : "FAIL") << '\n';
      passed += ok;
    }
    const double need = *census ? cfg.get_double("min-pass", 0.95) : 1.0;
    std::cout << passed << "/" << seeds << " seeds passed\n";
    if (passed < static_cast<int>(std::ceil(need * seeds - 1e-9))) {
      throw CheckFailed(std::to_string(passed) + "/" + std::to_string(seeds) + " seeds passed");
    }
    return int{kOk};
  };
}

}  // namespace poolnet::cli
