#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "poolnet/cnn.hpp"
#include "poolnet/detectors.hpp"
#include "poolnet/loss.hpp"
#include "poolnet/optimizer.hpp"
#include "poolnet/patterns.hpp"
#include "poolnet/svm.hpp"

namespace poolnet {

enum class Enforcement { Strict, Warn };
enum class TelemetryLevel { Full, Summary };

struct TrainConfig {
  int channels = 500;
  int first_steps = 50;        ///< T1
  long second_steps = 1000;    ///< T2
  double first_lr = 1e-3;      ///< eta1
  double second_lr = 1.0;      ///< eta2
  double init_radius = 1e-5;   ///< r
  std::uint64_t seed = 1;
  LossKind loss = LossKind::Logistic;
  Enforcement enforcement = Enforcement::Warn;
  /// Stop the second loop once L2 drops below this value (0 disables).
  double second_loss_tolerance = 0.0;
  TelemetryLevel telemetry = TelemetryLevel::Full;

  // joint training
  OptimizerKind optimizer = OptimizerKind::Adam;
  long joint_steps = 2000;
  double joint_lr = 1e-3;
  int batch_size = 0;  ///< 0 means full batch
  /// Stop joint training once the full-set loss drops below this value (0 disables).
  double joint_loss_tolerance = 0.0;
  int telemetry_stride = 1;
};

/// The four assumptions of the layerwise convergence theorem, checked
/// one at a time.
struct RegimeCheck {
  bool first_lr_ok = false;   ///< eta1 <= 1 / (4k(T1 + 1))
  bool radius_ok = false;     ///< r <= eta1 / 200
  bool second_lr_ok = false;  ///< eta2 < 8k
  bool width_ok = false;      ///< k > 8 d^3

  bool all() const { return first_lr_ok && radius_ok && second_lr_ok && width_ok; }
  std::string describe() const;
};

RegimeCheck check_regime(const TrainConfig& cfg, int d);

/// Largest admissible eta1, r = eta1 / 200, k = 8 d^3 + 1 and eta2 = 4k.
TrainConfig regime_config(int d, int first_steps, std::uint64_t seed);

/// Argmax pattern ids for a fixed set of filters on a fixed set of samples,
/// one vector per recorded step, filter-major. -1 marks an inactive filter.
struct ArgmaxLog {
  std::vector<int> filters;
  std::vector<int> samples;  ///< indices into S1
  std::vector<std::vector<int>> steps;

  int at(std::size_t step, std::size_t f, std::size_t s) const {
    return steps[step][f * samples.size() + s];
  }
};

enum class RunKind { Layerwise, Joint };

struct TrainRun {
  RunKind kind = RunKind::Layerwise;
  TrainConfig config;
  RegimeCheck regime;
  int dimension = 0;
  int patch_count = 0;

  CnnParams initial;
  CnnParams final_params;

  /// Layerwise: L1 at W^t for t = 0..T1. Joint: full-set loss per recorded step.
  Vector first_loss;
  /// L2 at a^t for t = 0..(steps actually run).
  Vector second_loss;
  long second_steps_run = 0;

  std::vector<long> telemetry_steps;
  std::vector<Matrix> projections;   ///< k x l per telemetry step (Full only)
  std::vector<Vector> filter_norms;  ///< per telemetry step (Full only)
  Vector max_abs_output;             ///< max |N(x)| over S1, per telemetry step

  LuckySets lucky;           ///< at initialization
  ArgmaxLog positive_argmax;  ///< positive lucky filters on positive S1 samples
  ArgmaxLog negative_argmax;  ///< negative lucky filters on negative S1 samples

  int s1_positives = 0;
  int s1_negatives = 0;
  std::size_t s1_size = 0;
  std::size_t s2_size = 0;
  double first_seconds = 0.0;
  double second_seconds = 0.0;
};

/// Second-layer gradient descent on the pooled features of S2. When there are
/// fewer samples than channels the iterate is tracked as a = a0 + Z c, which
/// turns each step into an m2 x m2 product; the arithmetic matches the direct
/// update up to rounding.
enum class SecondLayerPath { Auto, Primal, Dual };

/// LW_CNN: T1 full-batch steps on the filters over S1 with the readout frozen,
/// then T2 steps on the readout over S2 with the filters frozen.
TrainRun layerwise_train(const Dataset& s, const TrainConfig& cfg,
                         SecondLayerPath path = SecondLayerPath::Auto);

/// Both layers updated together on the whole training set.
TrainRun joint_train(const Dataset& s, const TrainConfig& cfg);

/// Comparison of the trained readout with the hard-margin separator of the
/// pooled S2 features.
struct DirectionReport {
  SvmStatus status = SvmStatus::Infeasible;
  bool separable() const { return status == SvmStatus::Optimal; }
  double cosine = 0.0;
  Vector max_margin_direction;
  double max_margin_norm_sq = 0.0;
};

DirectionReport second_layer_direction(const TrainRun& run, const Dataset& s2);

/// Fraction of samples with sign(N(x)) != y.
double train_error(const CnnParams& p, const Dataset& s);

}  // namespace poolnet
