#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "json.hpp"
#include "options.hpp"
#include "poolnet/dataset_io.hpp"
#include "poolnet/errors.hpp"
#include "poolnet/evaluate.hpp"
#include "poolnet/psi.hpp"
#include "poolnet/trainer.hpp"
#include "poolnet/vc.hpp"

namespace poolnet::cli {

Action add_vc(CLI::App& app) {
  auto* cmd = app.add_subcommand("vc", "Verify the shattering construction");
  auto n = std::make_shared<int>(3);
  auto all = std::make_shared<bool>(false);
  auto count = std::make_shared<int>(100);
  auto seed = std::make_shared<std::uint64_t>(1);
  auto mode = std::make_shared<std::string>("haar");
  auto out = std::make_shared<std::string>();
  cmd->add_option("--n", *n, "patches; d = l = 2n")->check(CLI::Range(2, 16));
  cmd->add_flag("--all-labelings", *all, "every labeling of the 2^(n-1) points");
  cmd->add_option("--labelings", *count, "random labelings when not exhaustive")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", *seed, "seed for the dictionary and random labelings");
  cmd->add_option("--mode", *mode, "haar or standard");
  cmd->add_option("--out", *out, "optional CSV of per-labeling results");

  return [=] {
    const int d = 2 * *n;
    RngStream rng(*seed);
    RngStream ps_rng = rng.split(1);
    RngStream label_rng = rng.split(2);
    const PatternSet ps = PatternSet::sample(d, d, ps_rng, parse_mode(*mode));
    const std::size_t points = std::size_t{1} << (*n - 1);
    if (*all && points > 16) throw ParameterError("--all-labelings supports n <= 5");
    const std::size_t total = *all ? (std::size_t{1} << points) : static_cast<std::size_t>(*count);

    std::ofstream csv;
    if (!out->empty()) {
      csv.open(*out);
      if (!csv) throw std::runtime_error("cannot write " + *out);
      csv << "labeling,residual,max_abs_error,signs_match,exact\n";
    }
    std::size_t exact = 0;
    double worst_error = 0.0, worst_residual = 0.0;
    std::vector<int> labels(points);
    for (std::size_t t = 0; t < total; ++t) {
      for (std::size_t i = 0; i < points; ++i) {
        labels[i] = *all ? (((t >> i) & 1U) ? 1 : -1) : label_rng.sign();
      }
      const ShatterInstance inst = vc_build_and_verify(labels, ps);
      exact += inst.exact;
      worst_error = std::max(worst_error, inst.max_abs_error);
      worst_residual = std::max(worst_residual, inst.residual);
      if (*all) {
        std::cout << "labeling";
        for (int y : labels) std::cout << ' ' << (y > 0 ? '+' : '-');
        std::cout << "  max|N - y| " << inst.max_abs_error << (inst.exact ? "  exact" : "  FAILED")
                  << '\n';
      }
      if (csv.is_open()) {
        csv << t << ',' << format_double(inst.residual) << ',' << format_double(inst.max_abs_error)
            << ',' << inst.signs_match << ',' << inst.exact << '\n';
      }
    }
    std::cout << exact << "/" << total << " labelings realized exactly (n = " << *n << ", "
              << points << " points, " << 2 * points << " channels); worst |N - y| "
              << worst_error << ", worst residual " << worst_residual << '\n';
    if (exact != total) throw CheckFailed("some labelings were not realized");
    return int{kOk};
  };
}

Action add_psi(CLI::App& app) {
  auto* cmd = app.add_subcommand("psi", "Detection ratios, PSI fit and the sample-size certificate");
  auto keys = std::make_shared<KeyedOptions>(cmd);
  keys->add("d", "pattern dimension");
  keys->add("n", "patches per input");
  keys->add("l", "number of patterns");
  keys->add("m", "training samples");
  keys->add("t1", "first-layer steps");
  keys->add("t2", "second-layer steps");
  keys->add("seed", "first seed");
  keys->add("seeds", "number of seeds");
  keys->add("test-count", "fresh samples for the test error");
  keys->add("delta", "failure probability recorded in the certificate");
  keys->add("b", "certificate only: b");
  keys->add("c", "certificate only: c");
  keys->add("patterns", "certificate only: |P|");
  keys->add("cert-m", "certificate only: m");
  auto out = std::make_shared<std::string>();
  cmd->add_option("--out", *out, "output directory for psi.csv and manifest.json");

  return [keys, out] {
    const Config cfg = keys->resolve();
    if (cfg.has("b") || cfg.has("c") || cfg.has("patterns") || cfg.has("cert-m")) {
      const PsiCertificate cert = psi_certificate(
          cfg.get_double("b", 1.0), cfg.get_double("c", 1.0),
          static_cast<int>(cfg.get_int("patterns", 10)), cfg.get_int("cert-m", 1000000),
          cfg.get_double("delta", 0.05), 0.0);
      std::cout << "threshold " << format_double(cert.threshold) << ", m " << cert.m << ": "
                << (cert.certified ? "certified" : cert.applicable ? "not certified"
                                                                   : "not applicable (b or c < 1)")
                << '\n';
      return int{kOk};
    }

    const int d = static_cast<int>(cfg.get_int("d", 10));
    const int n = static_cast<int>(cfg.get_int("n", 5));
    const int l = static_cast<int>(cfg.get_int("l", d));
    const int m = static_cast<int>(cfg.get_int("m", 400));
    const int t1 = static_cast<int>(cfg.get_int("t1", 50));
    const long t2 = cfg.get_int("t2", 100000);
    const auto first = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    const int seeds = static_cast<int>(cfg.get_int("seeds", 5));
    const int test_count = static_cast<int>(cfg.get_int("test-count", 10000));
    if (seeds < 1 || m < 2) throw ParameterError("need seeds >= 1 and m >= 2");

    struct RunOut {
      std::uint64_t seed;
      DetectionRatios ratios;
      Vector stats;
      double test_err;
    };
    std::vector<RunOut> runs;
    std::vector<std::vector<PsiTerm>> terms;
    for (int i = 0; i < seeds; ++i) {
      const std::uint64_t seed = first + static_cast<std::uint64_t>(i);
      RngStream root(seed);
      RngStream ps_rng = root.split(1);
      auto ps = std::make_shared<const PatternSet>(PatternSet::sample(d, l, ps_rng));
      RngStream data_rng = root.split(2);
      const Dataset ds = sample_dataset(ps, n, m, data_rng);
      TrainConfig tc = regime_config(d, t1, seed);
      tc.second_steps = t2;
      tc.telemetry = TelemetryLevel::Summary;
      const TrainRun run = layerwise_train(ds, tc);
      RngStream test_rng = root.split(3);
      const double err =
          test_error(cnn_scorer(run.final_params, ps.get()), *ps, n, 0.0, test_count, test_rng);
      RunOut r{seed, detection_ratios(run.final_params, *ps), pattern_stats(ds), err};
      terms.push_back(psi_terms(r.ratios, r.stats, m));
      std::cout << "seed " << seed << ": max ratio " << r.ratios.max_ratio() << ", test error "
                << err << '\n';
      runs.push_back(std::move(r));
    }
    const PsiFit fit = psi_fit(terms);
    double worst_err = 0.0;
    int small = 0, small_clean = 0;
    for (const auto& r : runs) {
      worst_err = std::max(worst_err, r.test_err);
      if (r.ratios.max_ratio() < 1.0 / l) {
        ++small;
        small_clean += r.test_err == 0.0;
      }
    }
    const PsiCertificate cert = psi_certificate(fit.b, fit.c, l, m, cfg.get_double("delta", 0.05),
                                                worst_err);
    std::cout << "fitted b " << fit.b << ", c " << fit.c << "; threshold " << cert.threshold
              << " vs m " << m << (cert.certified ? " (certified)" : " (not certified)") << '\n';
    std::cout << small << " seeds with every ratio < 1/|P|; " << small_clean
              << " of them with zero test error\n";

    if (!out->empty()) {
      const auto dir = ensure_dir(*out);
      std::ofstream csv(dir / "psi.csv");
      write_psi_csv_header(csv);
      for (const auto& r : runs) {
        write_psi_csv_rows(csv, r.seed, psi_check(r.ratios, r.stats, m, fit.b, fit.c));
      }
      nlohmann::ordered_json j;
      j["command"] = "psi";
      j["settings"] = {{"d", d}, {"n", n}, {"l", l}, {"m", m}, {"t1", t1}, {"t2", t2},
                       {"seed", first}, {"seeds", seeds}, {"test_count", test_count}};
      j["fit"] = {{"b", fit.b}, {"c", fit.c}};
      j["certificate"] = {{"threshold", cert.threshold}, {"applicable", cert.applicable},
                          {"certified", cert.certified}, {"delta", cert.delta},
                          {"predicted_error", cert.predicted_error},
                          {"measured_error", cert.measured_error}};
      write_text(dir / "manifest.json", j.dump(2) + "\n");
    }
    if (small_clean != small) throw CheckFailed("a run with small ratios misclassified test points");
    return int{kOk};
  };
}

}  // namespace poolnet::cli
