#include "poolnet/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "poolnet/dataset_io.hpp"
#include "poolnet/errors.hpp"
#include "poolnet/evaluate.hpp"
#include "poolnet/svm.hpp"

namespace poolnet {

namespace {

constexpr std::uint64_t kPatternStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kTestStream = 3;

std::uint64_t model_tag(SweepModel model) { return static_cast<std::uint64_t>(model) + 1; }

TrainConfig default_joint() {
  TrainConfig c;
  c.channels = 500;
  c.optimizer = OptimizerKind::Adam;
  c.joint_lr = 1e-3;
  c.joint_steps = 2000;
  c.batch_size = 0;
  c.init_radius = 1e-2;
  c.joint_loss_tolerance = 1e-3;
  c.telemetry = TelemetryLevel::Summary;
  c.telemetry_stride = 100;
  c.enforcement = Enforcement::Warn;
  return c;
}

TrainConfig default_layerwise() {
  TrainConfig c;
  c.channels = 0;
  c.first_steps = 50;
  c.second_steps = 100000;
  c.second_loss_tolerance = 0.0;
  c.telemetry = TelemetryLevel::Summary;
  c.telemetry_stride = 1000;
  c.enforcement = Enforcement::Strict;
  return c;
}

std::vector<int> to_ints(const std::vector<long>& v) {
  std::vector<int> out;
  for (long x : v) {
    if (x < 1 || x > std::numeric_limits<int>::max()) {
      throw ParameterError("sweep: grid values must be positive integers");
    }
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::vector<long> to_longs(const std::vector<int>& v) { return {v.begin(), v.end()}; }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double csv_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw FormatError("csv: bad number '" + s + "'");
}

long csv_long(const std::string& s) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw FormatError("csv: bad integer '" + s + "'");
}

std::string csv_number(double v) { return std::isnan(v) ? "nan" : format_double(v); }

}  // namespace

std::string_view to_string(SweepModel model) {
  switch (model) {
    case SweepModel::ConvPool:
      return "convpool";
    case SweepModel::ConvPoolLayerwise:
      return "convpool-lw";
    case SweepModel::Mlp:
      return "mlp";
    case SweepModel::Svm:
      return "svm";
  }
  return "?";
}

SweepModel parse_sweep_model(std::string_view name) {
  if (name == "convpool") return SweepModel::ConvPool;
  if (name == "convpool-lw") return SweepModel::ConvPoolLayerwise;
  if (name == "mlp") return SweepModel::Mlp;
  if (name == "svm") return SweepModel::Svm;
  throw ParameterError("unknown model '" + std::string(name) +
                       "' (expected convpool, convpool-lw, mlp or svm)");
}

std::size_t SweepSpec::cell_count() const {
  return models.size() * m_values.size() * n_values.size() * rho_values.size() *
         static_cast<std::size_t>(std::max(repeats, 0));
}

std::vector<std::string> sweep_preset_names() {
  return {"fig3a", "fig3b", "fig4", "thm51", "thmdu", "scaling"};
}

SweepSpec sweep_preset(std::string_view name) {
  SweepSpec s;
  s.name = std::string(name);
  s.convpool = default_joint();
  s.layerwise = default_layerwise();
  if (name == "fig3a") return s;
  if (name == "fig3b") {
    // Extends past 2^9 so the noisy set outgrows the linear separability of
    // the flattened input and the SVM train error becomes visible.
    s.m_values = {8, 16, 32, 64, 128, 256, 512, 1024};
    s.rho_values = {1.0};
    return s;
  }
  if (name == "fig4") {
    s.rho_values = {1.0};
    s.n_values = {5, 10, 20, 40};
    s.m_values = {64};
    return s;
  }
  if (name == "thm51" || name == "thmdu") {
    s.models = {SweepModel::ConvPoolLayerwise};
    s.d = 10;
    s.l = 10;
    s.n_values = {5};
    s.m_values = {400};
    s.test_count = name == "thmdu" ? 10000 : 1000;
    return s;
  }
  if (name == "scaling") {
    s.models = {SweepModel::ConvPoolLayerwise};
    return s;
  }
  throw ParameterError("unknown preset '" + std::string(name) + "'");
}

const std::set<std::string>& sweep_config_keys() {
  static const std::set<std::string> keys{
      "models",       "m",           "n",          "rho",         "d",
      "l",            "repeats",     "test-count", "seed",        "mode",
      "workers",      "channels",    "steps",      "lr",          "batch-size",
      "optimizer",    "init-radius", "loss",       "tolerance",   "lw-channels",
      "lw-t1",        "lw-t2",       "lw-tolerance", "mlp-hidden", "mlp-epochs",
      "mlp-lr",       "mlp-batch-size", "mlp-optimizer", "mlp-tolerance", "preset"};
  return keys;
}

void apply_sweep_config(SweepSpec& spec, const Config& cfg) {
  cfg.require_known(sweep_config_keys());
  if (auto v = cfg.get("models")) {
    spec.models.clear();
    for (const auto& name : split_list(*v)) spec.models.push_back(parse_sweep_model(name));
  }
  spec.m_values = to_ints(cfg.get_int_list("m", to_longs(spec.m_values)));
  spec.n_values = to_ints(cfg.get_int_list("n", to_longs(spec.n_values)));
  spec.rho_values = cfg.get_double_list("rho", spec.rho_values);
  spec.d = static_cast<int>(cfg.get_int("d", spec.d));
  spec.l = static_cast<int>(cfg.get_int("l", spec.l));
  spec.repeats = static_cast<int>(cfg.get_int("repeats", spec.repeats));
  spec.test_count = static_cast<int>(cfg.get_int("test-count", spec.test_count));
  spec.base_seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long>(spec.base_seed)));
  if (auto v = cfg.get("mode")) {
    if (*v == "haar") spec.mode = OrthoMode::Haar;
    else if (*v == "standard") spec.mode = OrthoMode::StandardBasis;
    else throw ParameterError("mode must be haar or standard");
  }
  spec.workers = static_cast<int>(cfg.get_int("workers", spec.workers));

  auto& j = spec.convpool;
  j.channels = static_cast<int>(cfg.get_int("channels", j.channels));
  j.joint_steps = cfg.get_int("steps", j.joint_steps);
  j.joint_lr = cfg.get_double("lr", j.joint_lr);
  j.batch_size = static_cast<int>(cfg.get_int("batch-size", j.batch_size));
  if (auto v = cfg.get("optimizer")) j.optimizer = parse_optimizer_kind(*v);
  j.init_radius = cfg.get_double("init-radius", j.init_radius);
  if (auto v = cfg.get("loss")) {
    j.loss = parse_loss_kind(*v);
    spec.layerwise.loss = j.loss;
    spec.mlp.loss = j.loss;
  }
  j.joint_loss_tolerance = cfg.get_double("tolerance", j.joint_loss_tolerance);

  auto& w = spec.layerwise;
  w.channels = static_cast<int>(cfg.get_int("lw-channels", w.channels));
  w.first_steps = static_cast<int>(cfg.get_int("lw-t1", w.first_steps));
  w.second_steps = cfg.get_int("lw-t2", w.second_steps);
  w.second_loss_tolerance = cfg.get_double("lw-tolerance", w.second_loss_tolerance);

  if (cfg.has("mlp-hidden")) {
    spec.mlp.hidden = static_cast<int>(cfg.get_int("mlp-hidden", spec.mlp.hidden));
    spec.mlp_match_width = false;
  }
  spec.mlp.epochs = static_cast<int>(cfg.get_int("mlp-epochs", spec.mlp.epochs));
  spec.mlp.lr = cfg.get_double("mlp-lr", spec.mlp.lr);
  spec.mlp.batch_size = static_cast<int>(cfg.get_int("mlp-batch-size", spec.mlp.batch_size));
  if (auto v = cfg.get("mlp-optimizer")) spec.mlp.optimizer = parse_optimizer_kind(*v);
  spec.mlp.loss_tolerance = cfg.get_double("mlp-tolerance", spec.mlp.loss_tolerance);

  if (spec.models.empty() || spec.m_values.empty() || spec.n_values.empty() ||
      spec.rho_values.empty()) {
    throw ParameterError("sweep: every grid axis needs at least one value");
  }
  if (spec.repeats < 1) throw ParameterError("sweep: repeats must be >= 1");
  if (spec.workers < 1) throw ParameterError("sweep: workers must be >= 1");
  for (double rho : spec.rho_values) {
    if (!(rho >= 0.0)) throw ParameterError("sweep: rho must be non-negative");
  }
}

std::uint64_t cell_seed(std::uint64_t base, int m, int n, double rho, int repeat) {
  return derive_seed(base, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(n),
                            std::bit_cast<std::uint64_t>(rho),
                            static_cast<std::uint64_t>(repeat)});
}

SweepRow run_cell(const SweepSpec& spec, SweepModel model, int m, int n, double rho, int repeat) {
  SweepRow row;
  row.model = model;
  row.m = m;
  row.n = n;
  row.rho = rho;
  row.repeat = repeat;
  row.seed = cell_seed(spec.base_seed, m, n, rho, repeat);
  const auto start = std::chrono::steady_clock::now();
  try {
    RngStream root(row.seed);
    RngStream ps_rng = root.split(kPatternStream);
    auto ps = std::make_shared<const PatternSet>(PatternSet::sample(spec.d, spec.l, ps_rng, spec.mode));
    RngStream train_rng = root.split(kTrainStream);
    const Dataset ds = sample_dataset(ps, n, m, train_rng, rho);
    RngStream test_rng = root.split(kTestStream);
    const std::uint64_t model_seed = derive_seed(row.seed, {model_tag(model)});

    switch (model) {
      case SweepModel::ConvPool: {
        TrainConfig cfg = spec.convpool;
        cfg.seed = model_seed;
        const TrainRun run = joint_train(ds, cfg);
        row.train_err = train_error(run.final_params, ds);
        row.test_err = test_error(cnn_scorer(run.final_params, ps.get()), *ps, n, rho,
                                  spec.test_count, test_rng);
        break;
      }
      case SweepModel::ConvPoolLayerwise: {
        TrainConfig cfg = regime_config(spec.d, spec.layerwise.first_steps, model_seed);
        if (spec.layerwise.channels > 0) cfg.channels = spec.layerwise.channels;
        cfg.second_steps = spec.layerwise.second_steps;
        cfg.second_loss_tolerance = spec.layerwise.second_loss_tolerance;
        cfg.loss = spec.layerwise.loss;
        cfg.telemetry = spec.layerwise.telemetry;
        cfg.telemetry_stride = spec.layerwise.telemetry_stride;
        cfg.enforcement = spec.layerwise.enforcement;
        const TrainRun run = layerwise_train(ds, cfg);
        row.train_err = train_error(run.final_params, ds);
        row.test_err = test_error(cnn_scorer(run.final_params, ps.get()), *ps, n, rho,
                                  spec.test_count, test_rng);
        break;
      }
      case SweepModel::Mlp: {
        MlpConfig cfg = spec.mlp;
        cfg.seed = model_seed;
        if (spec.mlp_match_width) cfg.hidden = matched_hidden_width(spec.convpool.channels, spec.d, n);
        const MlpRun run = mlp_train(ds, cfg);
        row.train_err = run.train_error;
        row.test_err = test_error(mlp_scorer(run.params), *ps, n, rho, spec.test_count, test_rng);
        break;
      }
      case SweepModel::Svm: {
        const SvmSolution sol = hard_margin_svm(ds);
        row.train_err = sol.train_error;
        row.test_err = test_error(linear_scorer(sol.weights), *ps, n, rho, spec.test_count, test_rng);
        row.status = sol.separable() ? "ok" : std::string(to_string(sol.status));
        break;
      }
    }
  } catch (const std::exception& e) {
    row.train_err = std::numeric_limits<double>::quiet_NaN();
    row.test_err = std::numeric_limits<double>::quiet_NaN();
    std::string what = e.what();
    std::replace(what.begin(), what.end(), ',', ';');
    std::replace(what.begin(), what.end(), '\n', ' ');
    row.status = "failed: " + what;
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows) {
  struct Acc {
    SweepAggregate head;
    std::vector<double> train, test, seconds;
  };
  std::vector<Acc> groups;
  std::map<std::tuple<int, int, int, std::uint64_t>, std::size_t> index;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(static_cast<int>(r.model), r.m, r.n,
                                     std::bit_cast<std::uint64_t>(r.rho));
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      Acc a;
      a.head.model = r.model;
      a.head.m = r.m;
      a.head.n = r.n;
      a.head.rho = r.rho;
      groups.push_back(std::move(a));
    }
    Acc& a = groups[it->second];
    // Infeasible SVM rows still carry errors; only crashed cells are excluded.
    if (std::isnan(r.train_err) || std::isnan(r.test_err)) {
      ++a.head.failures;
      continue;
    }
    a.train.push_back(r.train_err);
    a.test.push_back(r.test_err);
    a.seconds.push_back(r.seconds);
  }
  std::vector<SweepAggregate> out;
  for (auto& a : groups) {
    a.head.runs = static_cast<int>(a.test.size());
    a.head.train_mean = mean_of(a.train);
    a.head.train_std = std_of(a.train, a.head.train_mean);
    a.head.test_mean = mean_of(a.test);
    a.head.test_std = std_of(a.test, a.head.test_mean);
    a.head.seconds_mean = mean_of(a.seconds);
    a.head.seconds_std = std_of(a.seconds, a.head.seconds_mean);
    out.push_back(a.head);
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec, const SweepProgress& progress) {
  struct Task {
    SweepModel model;
    int m, n;
    double rho;
    int repeat;
  };
  std::vector<Task> tasks;
  for (SweepModel model : spec.models) {
    for (double rho : spec.rho_values) {
      for (int n : spec.n_values) {
        for (int m : spec.m_values) {
          for (int r = 0; r < spec.repeats; ++r) tasks.push_back({model, m, n, rho, r});
        }
      }
    }
  }
  SweepResult result;
  result.rows.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      SweepRow row = run_cell(spec, t.model, t.m, t.n, t.rho, t.repeat);
      std::lock_guard<std::mutex> lock(mu);
      result.rows[i] = std::move(row);
      ++done;
      if (progress) progress(result.rows[i], done, tasks.size());
    }
  };
  const int workers = std::max(1, std::min<int>(spec.workers, static_cast<int>(tasks.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  result.cells = aggregate_rows(result.rows);
  return result;
}

void write_raw_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "model,m,n,rho,repeat,seed,train_err,test_err,status\n";
  for (const auto& r : rows) {
    out << to_string(r.model) << ',' << r.m << ',' << r.n << ',' << format_double(r.rho) << ','
        << r.repeat << ',' << r.seed << ',' << csv_number(r.train_err) << ','
        << csv_number(r.test_err) << ',' << r.status << '\n';
  }
}

std::vector<SweepRow> read_raw_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("raw csv: empty input");
  if (line != "model,m,n,rho,repeat,seed,train_err,test_err,status") {
    throw FormatError("raw csv: unexpected header '" + line + "'");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw FormatError("raw csv: expected 9 fields in '" + line + "'");
    SweepRow r;
    r.model = parse_sweep_model(f[0]);
    r.m = static_cast<int>(csv_long(f[1]));
    r.n = static_cast<int>(csv_long(f[2]));
    r.rho = csv_double(f[3]);
    r.repeat = static_cast<int>(csv_long(f[4]));
    r.seed = std::stoull(f[5]);
    r.train_err = csv_double(f[6]);
    r.test_err = csv_double(f[7]);
    r.status = f[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_aggregate_csv(std::ostream& out, const std::vector<SweepAggregate>& cells) {
  out << "model,m,n,rho,runs,failures,train_mean,train_std,test_mean,test_std\n";
  for (const auto& c : cells) {
    out << to_string(c.model) << ',' << c.m << ',' << c.n << ',' << format_double(c.rho) << ','
        << c.runs << ',' << c.failures << ',' << format_double(c.train_mean) << ','
        << format_double(c.train_std) << ',' << format_double(c.test_mean) << ','
        << format_double(c.test_std) << '\n';
  }
}

std::vector<SweepAggregate> read_aggregate_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("aggregate csv: empty input");
  if (line != "model,m,n,rho,runs,failures,train_mean,train_std,test_mean,test_std") {
    throw FormatError("aggregate csv: unexpected header '" + line + "'");
  }
  std::vector<SweepAggregate> cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10) throw FormatError("aggregate csv: expected 10 fields in '" + line + "'");
    SweepAggregate c;
    c.model = parse_sweep_model(f[0]);
    c.m = static_cast<int>(csv_long(f[1]));
    c.n = static_cast<int>(csv_long(f[2]));
    c.rho = csv_double(f[3]);
    c.runs = static_cast<int>(csv_long(f[4]));
    c.failures = static_cast<int>(csv_long(f[5]));
    c.train_mean = csv_double(f[6]);
    c.train_std = csv_double(f[7]);
    c.test_mean = csv_double(f[8]);
    c.test_std = csv_double(f[9]);
    cells.push_back(c);
  }
  return cells;
}

void write_timings_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "model,m,n,rho,repeat,seconds\n";
  for (const auto& r : rows) {
    out << to_string(r.model) << ',' << r.m << ',' << r.n << ',' << format_double(r.rho) << ','
        << r.repeat << ',' << format_double(r.seconds) << '\n';
  }
}

std::vector<std::pair<int, double>> mean_test_by_m(const std::vector<SweepAggregate>& cells,
                                                   SweepModel model, int n, double rho) {
  std::vector<std::pair<int, double>> out;
  for (const auto& c : cells) {
    if (c.model == model && c.n == n && c.rho == rho) out.emplace_back(c.m, c.test_mean);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string sweep_manifest_json(const SweepSpec& spec) {
  nlohmann::ordered_json j;
  j["preset"] = spec.name;
  std::vector<std::string> models;
  for (auto m : spec.models) models.emplace_back(to_string(m));
  j["models"] = models;
  j["m"] = spec.m_values;
  j["n"] = spec.n_values;
  j["rho"] = spec.rho_values;
  j["d"] = spec.d;
  j["l"] = spec.l;
  j["repeats"] = spec.repeats;
  j["test_count"] = spec.test_count;
  j["seed"] = spec.base_seed;
  j["mode"] = spec.mode == OrthoMode::Haar ? "haar" : "standard";
  j["workers"] = spec.workers;
  j["convpool"] = {{"channels", spec.convpool.channels},
                   {"optimizer", spec.convpool.optimizer == OptimizerKind::Adam ? "adam" : "gd"},
                   {"steps", spec.convpool.joint_steps},
                   {"lr", spec.convpool.joint_lr},
                   {"batch_size", spec.convpool.batch_size},
                   {"init_radius", spec.convpool.init_radius},
                   {"loss", std::string(to_string(spec.convpool.loss))},
                   {"tolerance", spec.convpool.joint_loss_tolerance}};
  j["layerwise"] = {{"channels", spec.layerwise.channels},
                    {"t1", spec.layerwise.first_steps},
                    {"t2", spec.layerwise.second_steps},
                    {"tolerance", spec.layerwise.second_loss_tolerance}};
  j["mlp"] = {{"hidden", spec.mlp_match_width ? std::string("matched")
                                              : std::to_string(spec.mlp.hidden)},
              {"leak", spec.mlp.leak},
              {"optimizer", spec.mlp.optimizer == OptimizerKind::Adam ? "adam" : "gd"},
              {"lr", spec.mlp.lr},
              {"epochs", spec.mlp.epochs},
              {"batch_size", spec.mlp.batch_size},
              {"tolerance", spec.mlp.loss_tolerance}};
  return j.dump(2);
}

}  // namespace poolnet
