#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "poolnet/config.hpp"
#include "poolnet/mlp.hpp"
#include "poolnet/sampling.hpp"
#include "poolnet/trainer.hpp"

namespace poolnet {

enum class SweepModel { ConvPool, ConvPoolLayerwise, Mlp, Svm };

std::string_view to_string(SweepModel model);
SweepModel parse_sweep_model(std::string_view name);

struct SweepSpec {
  std::string name = "custom";
  std::vector<SweepModel> models{SweepModel::ConvPool, SweepModel::Mlp, SweepModel::Svm};
  std::vector<int> m_values{8, 16, 32, 64, 128, 256};
  std::vector<int> n_values{10};
  std::vector<double> rho_values{0.0};
  int d = 20;
  int l = 20;
  int repeats = 5;
  int test_count = 1000;
  std::uint64_t base_seed = 1;
  OrthoMode mode = OrthoMode::Haar;

  TrainConfig convpool;   ///< joint training settings
  TrainConfig layerwise;  ///< layerwise settings; channels 0 means the regime width
  MlpConfig mlp;
  bool mlp_match_width = true;  ///< hidden width from matched_hidden_width(convpool.channels, d, n)
  int workers = 1;

  std::size_t cell_count() const;
};

/// Built-in presets: fig3a, fig3b, fig4, thm51, thmdu, scaling.
SweepSpec sweep_preset(std::string_view name);
std::vector<std::string> sweep_preset_names();

/// Applies sweep keys from a config (models, m, n, rho, d, l, repeats, ...).
void apply_sweep_config(SweepSpec& spec, const Config& cfg);
/// Every key accepted by apply_sweep_config.
const std::set<std::string>& sweep_config_keys();

struct SweepRow {
  SweepModel model = SweepModel::ConvPool;
  int m = 0;
  int n = 0;
  double rho = 0.0;
  int repeat = 0;
  std::uint64_t seed = 0;
  double train_err = 0.0;
  double test_err = 0.0;
  std::string status = "ok";
  double seconds = 0.0;  ///< wall time, kept out of the raw CSV
};

/// Seed shared by every model in a (m, n, rho, repeat) cell; the pattern
/// dictionary, the training set and the test stream derive from it.
std::uint64_t cell_seed(std::uint64_t base, int m, int n, double rho, int repeat);

/// Runs one model on one cell. Training failures are caught and reported in
/// `status` with NaN errors.
SweepRow run_cell(const SweepSpec& spec, SweepModel model, int m, int n, double rho, int repeat);

struct SweepAggregate {
  SweepModel model = SweepModel::ConvPool;
  int m = 0;
  int n = 0;
  double rho = 0.0;
  int runs = 0;  ///< rows with status ok
  int failures = 0;
  double train_mean = 0.0;
  double train_std = 0.0;
  double test_mean = 0.0;
  double test_std = 0.0;
  double seconds_mean = 0.0;
  double seconds_std = 0.0;
};

/// Groups rows by (model, m, n, rho) in first-appearance order. Standard
/// deviations use the population formula; failed rows are excluded.
std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows);

struct SweepResult {
  std::vector<SweepRow> rows;  ///< grid order: model, rho, n, m, repeat
  std::vector<SweepAggregate> cells;
};

using SweepProgress = std::function<void(const SweepRow&, std::size_t done, std::size_t total)>;

/// Runs every cell on `spec.workers` threads and merges results in grid order.
SweepResult run_sweep(const SweepSpec& spec, const SweepProgress& progress = {});

/// `model,m,n,rho,repeat,seed,train_err,test_err,status`
void write_raw_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_raw_csv(std::istream& in);
/// `model,m,n,rho,runs,failures,train_mean,train_std,test_mean,test_std`
void write_aggregate_csv(std::ostream& out, const std::vector<SweepAggregate>& cells);
std::vector<SweepAggregate> read_aggregate_csv(std::istream& in);
/// `model,m,n,rho,repeat,seconds`
void write_timings_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Mean test error of `model` at each m (sorted), for a fixed n and rho.
std::vector<std::pair<int, double>> mean_test_by_m(const std::vector<SweepAggregate>& cells,
                                                   SweepModel model, int n, double rho);

/// JSON manifest of a spec (every field needed to rerun it).
std::string sweep_manifest_json(const SweepSpec& spec);

}  // namespace poolnet
