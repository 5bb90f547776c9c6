#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poolnet/cnn.hpp"
#include "poolnet/detectors.hpp"
#include "poolnet/patterns.hpp"
#include "poolnet/trainer.hpp"

namespace poolnet {

// ---- initialization census ----

/// Probability that one filter lands in the positive lucky set:
/// (1 - 2^{1-d}) / (2(d - 1)).
double lucky_probability(int d);

struct CensusReport {
  int channels = 0;
  int dimension = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  double lower = 0.0;  ///< k / (4d)
  double upper = 0.0;  ///< k / d
  double expected_fraction = 0.0;
  bool verdict = false;  ///< both counts inside [lower, upper]
};

CensusReport lucky_census(const CnnParams& p0, const PatternSet& ps);

// ---- first-layer dynamics ----

enum class BoundKind {
  LuckyGrowth,    ///< o_c . w_i^t >= t eta1 / 9 on lucky filters
  OffPatternCap,  ///< o_j . w_i^t <= r for j != c on lucky filters
  ArgmaxPattern,  ///< lucky filters pool the class pattern on same-class S1 points
  LuckyMonotone,  ///< o_c . w_i^t non-decreasing on lucky filters
  FilterNorm,     ///< ||w_i^t|| <= eta1 (t + 1), every filter
  OutputBound,    ///< |N(x)| <= 1/2 on S1
  ActivationCap,  ///< o_j . w_i^t <= 2 eta1 t for t >= 1, every filter and pattern
};

std::string_view to_string(BoundKind kind);
inline constexpr int kBoundKinds = 7;

struct Violation {
  BoundKind bound;
  int filter = -1;
  long step = 0;
  int pattern = -1;  ///< pattern id or S1 sample index (argmax checks)
  double observed = 0.0;
  double limit = 0.0;
  double slack = 0.0;  ///< negative when violated
};

struct BoundSummary {
  BoundKind bound;
  long checks = 0;
  long violations = 0;
  double worst_slack = 0.0;  ///< smallest slack seen; 0 if nothing checked
  bool recorded = true;      ///< false when the telemetry needed is missing
};

struct DynamicsReport {
  bool in_regime = false;
  RegimeCheck regime;
  int s1_positives = 0;
  int s1_negatives = 0;
  std::vector<BoundSummary> bounds;  ///< one per BoundKind, in enum order
  std::vector<Violation> violations;  ///< first `max_listed` violations
  long total_violations = 0;

  bool clean() const { return total_violations == 0; }
  const BoundSummary& summary(BoundKind kind) const {
    return bounds[static_cast<std::size_t>(kind)];
  }
};

/// Checks every bound on the recorded telemetry of a layerwise run. Values are
/// compared with a relative tolerance of 1e-9 so that rounding in the
/// projections cannot produce spurious failures.
DynamicsReport dynamics_audit(const TrainRun& run, const PatternSet& ps,
                              std::size_t max_listed = 1000);

// ---- pooled features and the v* certificate ----

/// k x count matrix whose column s is z(x_s)_i = max_j relu(w_i . x_s[j]).
Matrix z_features(const Matrix& filters, std::span<const LabeledSample> samples,
                  const PatternSet* ps);

/// +80d/(k eta1 T1) on the positive lucky set, the negative of that on the
/// negative lucky set, zero elsewhere. Empty when either set is empty.
Vector construct_vstar(const LuckySets& lucky, double first_lr, int first_steps, int d, int k);

struct VstarReport {
  bool constructible = false;
  std::size_t points = 0;
  double min_margin = 0.0;       ///< min y v* . z(x) over fresh points
  double vstar_norm_sq = 0.0;
  double vstar_norm_bound = 0.0;  ///< 2 * 80^2 d / (k eta1^2 T1^2)
  double max_z_norm_sq = 0.0;
  double z_norm_bound = 0.0;      ///< 4 k eta1^2 T1^2
  double product = 0.0;           ///< ||v*||^2 max ||z||^2
  double product_bound = 0.0;     ///< 51200 d
  bool margin_ok() const { return constructible && min_margin > 1.0; }
  bool product_ok() const { return constructible && product <= product_bound; }
};

VstarReport vstar_report(const TrainRun& run, const PatternSet& ps, int count, RngStream& rng);

// ---- rendering ----

struct TheoryReport {
  std::optional<CensusReport> census;
  std::optional<DynamicsReport> dynamics;
  std::optional<VstarReport> vstar;
};

/// Human-readable summary.
void write_theory_text(std::ostream& out, const TheoryReport& report);
/// One row per checked bound: section,check,observed,limit,slack,checks,violations,passed.
void write_theory_csv(std::ostream& out, const TheoryReport& report);

}  // namespace poolnet
