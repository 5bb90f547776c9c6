#include "poolnet/telemetry_io.hpp"

#include <ostream>

#include "json.hpp"
#include "poolnet/dataset_io.hpp"

namespace poolnet {

void write_telemetry_csv(std::ostream& out, const TrainRun& run, ProjectionRows rows) {
  out << "step,layer,loss,filter,pattern,projection\n";
  std::vector<int> filters;
  if (rows == ProjectionRows::Lucky) {
    filters = run.lucky.positive;
    filters.insert(filters.end(), run.lucky.negative.begin(), run.lucky.negative.end());
  }
  for (std::size_t r = 0; r < run.telemetry_steps.size(); ++r) {
    const long step = run.telemetry_steps[r];
    out << step << ",1," << format_double(run.first_loss[r]) << ",,,\n";
    if (rows == ProjectionRows::None || r >= run.projections.size()) continue;
    const Matrix& proj = run.projections[r];
    auto emit = [&](std::size_t i) {
      for (std::size_t j = 0; j < proj.cols(); ++j) {
        out << step << ",1,," << i << ',' << j << ',' << format_double(proj(i, j)) << '\n';
      }
    };
    if (rows == ProjectionRows::All) {
      for (std::size_t i = 0; i < proj.rows(); ++i) emit(i);
    } else {
      for (int i : filters) emit(static_cast<std::size_t>(i));
    }
  }
  for (std::size_t t = 0; t < run.second_loss.size(); ++t) {
    out << t << ",2," << format_double(run.second_loss[t]) << ",,,\n";
  }
}

std::string run_manifest_json(const TrainRun& run) {
  const TrainConfig& c = run.config;
  nlohmann::ordered_json j;
  j["kind"] = run.kind == RunKind::Joint ? "joint" : "layerwise";
  j["config"] = {
      {"channels", c.channels},
      {"first_steps", c.first_steps},
      {"second_steps", c.second_steps},
      {"first_lr", c.first_lr},
      {"second_lr", c.second_lr},
      {"init_radius", c.init_radius},
      {"seed", c.seed},
      {"loss", std::string(to_string(c.loss))},
      {"enforcement", c.enforcement == Enforcement::Strict ? "strict" : "warn"},
      {"second_loss_tolerance", c.second_loss_tolerance},
      {"telemetry", c.telemetry == TelemetryLevel::Full ? "full" : "summary"},
      {"optimizer", std::string(to_string(c.optimizer))},
      {"joint_steps", c.joint_steps},
      {"joint_lr", c.joint_lr},
      {"batch_size", c.batch_size},
      {"joint_loss_tolerance", c.joint_loss_tolerance},
  };
  j["regime"] = {{"first_lr", run.regime.first_lr_ok},
                 {"init_radius", run.regime.radius_ok},
                 {"second_lr", run.regime.second_lr_ok},
                 {"width", run.regime.width_ok},
                 {"all", run.regime.all()}};
  j["dimension"] = run.dimension;
  j["patch_count"] = run.patch_count;
  j["s1"] = {{"size", run.s1_size}, {"positives", run.s1_positives},
             {"negatives", run.s1_negatives}};
  j["s2_size"] = run.s2_size;
  j["lucky"] = {{"positive", run.lucky.positive.size()},
                {"negative", run.lucky.negative.size()}};
  if (!run.first_loss.empty()) j["final_first_loss"] = run.first_loss.back();
  if (!run.second_loss.empty()) j["final_second_loss"] = run.second_loss.back();
  j["second_steps_run"] = run.second_steps_run;
  j["seconds"] = {{"first", run.first_seconds}, {"second", run.second_seconds}};
  return j.dump(2);
}

}  // namespace poolnet
