#include "poolnet/psi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "poolnet/dataset_io.hpp"
#include "poolnet/detectors.hpp"
#include "poolnet/errors.hpp"

namespace poolnet {

DetectorAssignment detector_assignment(const CnnParams& p, const PatternSet& ps) {
  const Matrix proj = pattern_projections(p.filters, ps);
  DetectorAssignment out;
  out.pattern.assign(proj.rows(), -1);
  out.group.assign(proj.rows(), DetectorGroup::Undetecting);
  for (std::size_t j = 0; j < proj.rows(); ++j) {
    const auto row = proj.row(j);
    if (p.readout[j] == 0.0) continue;
    const bool pos = p.readout[j] > 0.0;
    const int id = pos ? positive_view(row) : negative_view(row);
    if (row[static_cast<std::size_t>(id)] <= 0.0) continue;
    out.pattern[j] = id;
    out.group[j] = pos ? DetectorGroup::Positive : DetectorGroup::Negative;
  }
  return out;
}

DetectionStrengths detection_strengths(const CnnParams& p, const PatternSet& ps) {
  const Matrix proj = pattern_projections(p.filters, ps);
  const auto l = static_cast<std::size_t>(ps.count());
  DetectionStrengths s{Vector(l, 0.0), Vector(l, 0.0), Vector(l, 0.0), Vector(l, 0.0)};
  for (std::size_t j = 0; j < proj.rows(); ++j) {
    const double a = p.readout[j];
    if (a == 0.0) continue;
    const auto row = proj.row(j);
    const auto pv = static_cast<std::size_t>(positive_view(row));
    const auto nv = static_cast<std::size_t>(negative_view(row));
    if (row[pv] > 0.0) (a > 0.0 ? s.plus_pos : s.plus_neg)[pv] += std::abs(a) * row[pv];
    if (row[nv] > 0.0) (a > 0.0 ? s.minus_pos : s.minus_neg)[nv] += std::abs(a) * row[nv];
  }
  return s;
}

double DetectionRatios::max_ratio() const {
  double best = 0.0;
  for (const auto& v : plus) {
    if (v) best = std::max(best, *v);
  }
  for (const auto& v : minus) {
    if (v) best = std::max(best, *v);
  }
  return best;
}

DetectionRatios detection_ratios(const DetectionStrengths& s) {
  const std::size_t l = s.plus_pos.size();
  DetectionRatios r;
  r.plus.resize(l);
  r.minus.resize(l);
  const double plus_ref = s.plus_pos[kPositivePattern];
  const double minus_ref = s.minus_neg[kNegativePattern];
  r.plus_defined = plus_ref > 0.0;
  r.minus_defined = minus_ref > 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    if (r.plus_defined && i != static_cast<std::size_t>(kNegativePattern)) {
      r.plus[i] = s.plus_neg[i] / plus_ref;
    }
    if (r.minus_defined && i != static_cast<std::size_t>(kPositivePattern)) {
      r.minus[i] = s.minus_pos[i] / minus_ref;
    }
  }
  return r;
}

DetectionRatios detection_ratios(const CnnParams& p, const PatternSet& ps) {
  return detection_ratios(detection_strengths(p, ps));
}

std::vector<PsiTerm> psi_terms(const DetectionRatios& r, std::span<const double> s, long m) {
  if (s.size() != r.plus.size()) throw DimensionError("psi: statistics size mismatch");
  if (m < 1) throw ParameterError("psi: m must be >= 1");
  const double s_pos = s[kPositivePattern];
  const double s_neg = s[kNegativePattern];
  if (s_pos == 0.0 || s_neg == 0.0) {
    throw ParameterError("psi: degenerate training set (no positive or no negative samples)");
  }
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<PsiTerm> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (r.plus[i]) {
      out.push_back({static_cast<int>(i), true, *r.plus[i], std::max(-s[i] / s_pos, 0.0),
                     inv_sqrt_m});
    }
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (r.minus[i]) {
      out.push_back({static_cast<int>(i), false, *r.minus[i], std::max(-s[i] / s_neg, 0.0),
                     inv_sqrt_m});
    }
  }
  return out;
}

bool PsiCheck::all() const {
  return std::all_of(satisfied.begin(), satisfied.end(), [](bool v) { return v; });
}

PsiCheck psi_check(const DetectionRatios& r, std::span<const double> s, long m, double b,
                   double c) {
  PsiCheck out;
  out.terms = psi_terms(r, s, m);
  out.worst_slack = std::numeric_limits<double>::infinity();
  for (const auto& t : out.terms) {
    const double bound = b * t.stat_term + c * t.sample_term;
    out.bounds.push_back(bound);
    out.satisfied.push_back(t.ratio <= bound);
    out.worst_slack = std::min(out.worst_slack, bound - t.ratio);
  }
  if (out.terms.empty()) out.worst_slack = 0.0;
  return out;
}

PsiFit psi_fit(const std::vector<std::vector<PsiTerm>>& runs) {
  if (runs.empty()) throw ParameterError("psi_fit: no runs");
  std::vector<PsiTerm> all;
  for (const auto& r : runs) all.insert(all.end(), r.begin(), r.end());

  // Relative slack so that vertices computed from the constraints themselves
  // are not rejected by rounding.
  auto feasible = [&](double b, double c) {
    if (b < 1.0 || c < 1.0) return false;
    for (const auto& t : all) {
      const double rhs = b * t.stat_term + c * t.sample_term;
      if (t.ratio > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) return false;
    }
    return true;
  };

  std::vector<PsiFit> candidates{{1.0, 1.0}};
  for (const auto& t : all) {
    if (t.stat_term > 0.0) candidates.push_back({(t.ratio - t.sample_term) / t.stat_term, 1.0});
    if (t.sample_term > 0.0) candidates.push_back({1.0, (t.ratio - t.stat_term) / t.sample_term});
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const auto& p = all[i];
      const auto& q = all[j];
      const double det = p.stat_term * q.sample_term - q.stat_term * p.sample_term;
      if (det == 0.0) continue;
      const double b = (p.ratio * q.sample_term - q.ratio * p.sample_term) / det;
      const double c = (p.stat_term * q.ratio - q.stat_term * p.ratio) / det;
      candidates.push_back({b, c});
    }
  }
  PsiFit best{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const auto& cand : candidates) {
    if (!std::isfinite(cand.b) || !std::isfinite(cand.c) || !feasible(cand.b, cand.c)) continue;
    const double obj = cand.b + cand.c;
    const double cur = best.b + best.c;
    if (obj < cur || (obj == cur && cand.b < best.b)) best = cand;
  }
  if (!std::isfinite(best.b)) {
    // Every term has a positive 1/sqrt(m) coefficient, so raising c always
    // restores feasibility; this branch only guards against rounding.
    double c = 1.0;
    for (const auto& t : all) c = std::max(c, (t.ratio - t.stat_term) / t.sample_term);
    best = {1.0, c * (1.0 + 1e-12)};
  }
  return best;
}

PsiCertificate psi_certificate(double b, double c, int pattern_count, long m, double delta,
                               double measured_error) {
  if (pattern_count < 2) throw ParameterError("psi_certificate: need at least two patterns");
  PsiCertificate cert;
  cert.b = b;
  cert.c = c;
  cert.pattern_count = pattern_count;
  cert.m = m;
  cert.delta = delta;
  const double p = pattern_count;
  cert.threshold = 300.0 * b * b * c * c * p * p * std::log(p);
  cert.applicable = b >= 1.0 && c >= 1.0;
  cert.certified = cert.applicable && static_cast<double>(m) > cert.threshold;
  cert.predicted_error = 0.0;
  cert.measured_error = measured_error;
  return cert;
}

void write_psi_csv_header(std::ostream& out) {
  out << "seed,pattern,side,ratio,bound,satisfied\n";
}

void write_psi_csv_rows(std::ostream& out, std::uint64_t seed, const PsiCheck& check) {
  for (std::size_t i = 0; i < check.terms.size(); ++i) {
    const auto& t = check.terms[i];
    out << seed << ',' << t.pattern << ',' << (t.plus ? "plus" : "minus") << ','
        << format_double(t.ratio) << ',' << format_double(check.bounds[i]) << ','
        << (check.satisfied[i] ? 1 : 0) << '\n';
  }
}

}  // namespace poolnet
