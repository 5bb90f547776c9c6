#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "poolnet/cnn.hpp"
#include "poolnet/patterns.hpp"

namespace poolnet {

enum class DetectorGroup { Positive, Negative, Undetecting };

/// Readout +1 filters detect argmax over the positive pattern and the
/// spurious patterns; readout -1 filters use the negative pattern instead.
/// Filters whose best projection is not positive detect nothing.
struct DetectorAssignment {
  std::vector<int> pattern;  ///< -1 when undetecting
  std::vector<DetectorGroup> group;
};

DetectorAssignment detector_assignment(const CnnParams& p, const PatternSet& ps);

/// Detection strengths, indexed by pattern id.
///
/// The positive family views every filter through its argmax over all
/// patterns but the negative one; the negative family uses the argmax over
/// all patterns but the positive one. Within a family a filter adds
/// |a_j| (w_j . o_i) to the entry of its detected pattern i, split by the
/// sign of a_j. Scaling every filter by lambda > 0 scales all strengths by
/// lambda.
struct DetectionStrengths {
  Vector plus_pos;   ///< readout > 0, positive view
  Vector plus_neg;   ///< readout < 0, positive view
  Vector minus_pos;  ///< readout > 0, negative view
  Vector minus_neg;  ///< readout < 0, negative view
};

DetectionStrengths detection_strengths(const CnnParams& p, const PatternSet& ps);

/// Left-hand sides of the two PSI inequalities. Entries are empty for patterns
/// outside the inequality's range and when the reference strength is zero.
struct DetectionRatios {
  std::vector<std::optional<double>> plus;   ///< plus_neg(i) / plus_pos(positive), i in {positive} + spurious
  std::vector<std::optional<double>> minus;  ///< minus_pos(i) / minus_neg(negative), i in {negative} + spurious
  bool plus_defined = false;
  bool minus_defined = false;

  /// Largest defined ratio (0 when none).
  double max_ratio() const;
};

DetectionRatios detection_ratios(const DetectionStrengths& s);
DetectionRatios detection_ratios(const CnnParams& p, const PatternSet& ps);

/// One side of the inequality for one pattern.
struct PsiTerm {
  int pattern = 0;
  bool plus = true;
  double ratio = 0.0;
  double stat_term = 0.0;   ///< max(-s_i / s_ref, 0)
  double sample_term = 0.0; ///< 1 / sqrt(m)
};

/// Collects the defined terms of a run. Throws ParameterError when s for the
/// positive or negative pattern is zero.
std::vector<PsiTerm> psi_terms(const DetectionRatios& r, std::span<const double> s, long m);

struct PsiCheck {
  std::vector<PsiTerm> terms;
  std::vector<double> bounds;
  std::vector<bool> satisfied;
  double worst_slack = 0.0;  ///< min bound - ratio
  bool all() const;
};

PsiCheck psi_check(const DetectionRatios& r, std::span<const double> s, long m, double b, double c);

struct PsiFit {
  double b = 1.0;
  double c = 1.0;
};

/// Smallest b + c with b, c >= 1 such that every term satisfies
/// ratio <= b * stat_term + c * sample_term. Solved by enumerating the
/// vertices of the two-variable feasible region.
PsiFit psi_fit(const std::vector<std::vector<PsiTerm>>& runs);

struct PsiCertificate {
  double b = 0.0;
  double c = 0.0;
  int pattern_count = 0;
  long m = 0;
  double delta = 0.0;
  double threshold = 0.0;  ///< 300 b^2 c^2 |P|^2 ln |P|
  bool applicable = false;  ///< b, c >= 1
  bool certified = false;   ///< applicable and m > threshold
  double predicted_error = 0.0;
  double measured_error = 0.0;
};

PsiCertificate psi_certificate(double b, double c, int pattern_count, long m, double delta,
                               double measured_error);

/// Rows `seed,pattern,side,ratio,bound,satisfied`.
void write_psi_csv_header(std::ostream& out);
void write_psi_csv_rows(std::ostream& out, std::uint64_t seed, const PsiCheck& check);

}  // namespace poolnet
