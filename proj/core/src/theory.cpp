#include "poolnet/theory.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "poolnet/dataset_io.hpp"
#include "poolnet/errors.hpp"

namespace poolnet {

double lucky_probability(int d) {
  if (d < 2) throw ParameterError("lucky_probability: need d >= 2");
  return (1.0 - std::ldexp(1.0, 1 - d)) / (2.0 * (d - 1));
}

CensusReport lucky_census(const CnnParams& p0, const PatternSet& ps) {
  if (p0.filters.cols() != static_cast<std::size_t>(ps.dimension())) {
    throw DimensionError("lucky_census: filter dimension does not match patterns");
  }
  const LuckySets lucky = lucky_sets(p0, ps);
  CensusReport r;
  r.channels = p0.channels();
  r.dimension = ps.dimension();
  r.positive = lucky.positive.size();
  r.negative = lucky.negative.size();
  r.lower = static_cast<double>(r.channels) / (4.0 * r.dimension);
  r.upper = static_cast<double>(r.channels) / r.dimension;
  r.expected_fraction = lucky_probability(r.dimension);
  auto inside = [&](std::size_t c) {
    const double v = static_cast<double>(c);
    return v >= r.lower && v <= r.upper;
  };
  r.verdict = inside(r.positive) && inside(r.negative);
  return r;
}

std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::LuckyGrowth:
      return "lucky_growth";
    case BoundKind::OffPatternCap:
      return "off_pattern_cap";
    case BoundKind::ArgmaxPattern:
      return "argmax_pattern";
    case BoundKind::LuckyMonotone:
      return "lucky_monotone";
    case BoundKind::FilterNorm:
      return "filter_norm";
    case BoundKind::OutputBound:
      return "output_bound";
    case BoundKind::ActivationCap:
      return "activation_cap";
  }
  return "unknown";
}

namespace {

double tolerance(double a, double b) { return 1e-9 * std::max(std::abs(a), std::abs(b)); }

class Auditor {
 public:
  Auditor(DynamicsReport& rep, std::size_t max_listed) : rep_(rep), max_listed_(max_listed) {
    for (int b = 0; b < kBoundKinds; ++b) {
      BoundSummary s;
      s.bound = static_cast<BoundKind>(b);
      rep_.bounds.push_back(s);
    }
  }

  /// observed >= limit
  void at_least(BoundKind b, int filter, long step, int pattern, double observed, double limit) {
    record(b, filter, step, pattern, observed, limit, observed - limit,
           observed >= limit - tolerance(observed, limit));
  }

  /// observed <= limit
  void at_most(BoundKind b, int filter, long step, int pattern, double observed, double limit) {
    record(b, filter, step, pattern, observed, limit, limit - observed,
           observed <= limit + tolerance(observed, limit));
  }

  void missing(BoundKind b) { rep_.bounds[static_cast<std::size_t>(b)].recorded = false; }

 private:
  void record(BoundKind b, int filter, long step, int pattern, double observed, double limit,
              double slack, bool ok) {
    BoundSummary& s = rep_.bounds[static_cast<std::size_t>(b)];
    s.worst_slack = s.checks == 0 ? slack : std::min(s.worst_slack, slack);
    ++s.checks;
    if (ok) return;
    ++s.violations;
    ++rep_.total_violations;
    if (rep_.violations.size() < max_listed_) {
      rep_.violations.push_back({b, filter, step, pattern, observed, limit, slack});
    }
  }

  DynamicsReport& rep_;
  std::size_t max_listed_;
};

}  // namespace

DynamicsReport dynamics_audit(const TrainRun& run, const PatternSet& ps, std::size_t max_listed) {
  DynamicsReport rep;
  rep.regime = run.regime;
  rep.in_regime = run.regime.all() && run.kind == RunKind::Layerwise;
  rep.s1_positives = run.s1_positives;
  rep.s1_negatives = run.s1_negatives;
  Auditor audit(rep, max_listed);

  const double eta = run.config.first_lr;
  const double radius = run.config.init_radius;
  const std::size_t steps = run.telemetry_steps.size();
  const bool have_proj = run.projections.size() == steps && steps > 0;
  if (have_proj && run.projections.front().cols() != static_cast<std::size_t>(ps.count())) {
    throw DimensionError("dynamics_audit: projections do not match the pattern set");
  }

  for (std::size_t r = 0; r < steps; ++r) {
    const long t = run.telemetry_steps[r];
    const double td = static_cast<double>(t);
    audit.at_most(BoundKind::OutputBound, -1, t, -1, run.max_abs_output[r], 0.5);
    if (!have_proj) continue;

    const Matrix& proj = run.projections[r];
    const std::size_t l = proj.cols();
    auto lucky = [&](const std::vector<int>& filters, int cls) {
      for (int f : filters) {
        const auto row = proj.row(static_cast<std::size_t>(f));
        audit.at_least(BoundKind::LuckyGrowth, f, t, cls, row[static_cast<std::size_t>(cls)],
                       td * eta / 9.0);
        for (std::size_t j = 0; j < l; ++j) {
          if (static_cast<int>(j) == cls) continue;
          audit.at_most(BoundKind::OffPatternCap, f, t, static_cast<int>(j), row[j], radius);
        }
        if (r > 0) {
          const double prev = run.projections[r - 1](static_cast<std::size_t>(f),
                                                     static_cast<std::size_t>(cls));
          audit.at_least(BoundKind::LuckyMonotone, f, t, cls, row[static_cast<std::size_t>(cls)],
                         prev);
        }
      }
    };
    lucky(run.lucky.positive, kPositivePattern);
    lucky(run.lucky.negative, kNegativePattern);

    for (std::size_t i = 0; i < run.filter_norms[r].size(); ++i) {
      audit.at_most(BoundKind::FilterNorm, static_cast<int>(i), t, -1, run.filter_norms[r][i],
                    eta * (td + 1.0));
    }
    if (t >= 1) {
      for (std::size_t i = 0; i < proj.rows(); ++i) {
        for (std::size_t j = 0; j < l; ++j) {
          audit.at_most(BoundKind::ActivationCap, static_cast<int>(i), t, static_cast<int>(j),
                        proj(i, j), 2.0 * eta * td);
        }
      }
    }
  }

  auto argmax = [&](const ArgmaxLog& log, int cls) {
    for (std::size_t r = 0; r < log.steps.size() && r < steps; ++r) {
      for (std::size_t f = 0; f < log.filters.size(); ++f) {
        for (std::size_t s = 0; s < log.samples.size(); ++s) {
          const int id = log.at(r, f, s);
          // Encoded as a 0/1 check: observed 1 when the pooled pattern is the class pattern.
          audit.at_least(BoundKind::ArgmaxPattern, log.filters[f], run.telemetry_steps[r],
                         log.samples[s], id == cls ? 1.0 : 0.0, 1.0);
        }
      }
    }
  };
  if (have_proj) {
    argmax(run.positive_argmax, kPositivePattern);
    argmax(run.negative_argmax, kNegativePattern);
  } else {
    for (BoundKind b : {BoundKind::LuckyGrowth, BoundKind::OffPatternCap, BoundKind::ArgmaxPattern,
                        BoundKind::LuckyMonotone, BoundKind::FilterNorm, BoundKind::ActivationCap}) {
      audit.missing(b);
    }
  }
  return rep;
}

Matrix z_features(const Matrix& filters, std::span<const LabeledSample> samples,
                  const PatternSet* ps) {
  CnnParams p{filters, Vector(filters.rows(), 0.0)};
  return forward_batch(p, PatchBatch::from_samples(samples, ps)).pooled;
}

Vector construct_vstar(const LuckySets& lucky, double first_lr, int first_steps, int d, int k) {
  if (lucky.positive.empty() || lucky.negative.empty() || first_steps <= 0 || !(first_lr > 0.0)) {
    return {};
  }
  const double v = 80.0 * d / (static_cast<double>(k) * first_lr * first_steps);
  Vector out(static_cast<std::size_t>(k), 0.0);
  for (int i : lucky.positive) out[static_cast<std::size_t>(i)] = v;
  for (int i : lucky.negative) out[static_cast<std::size_t>(i)] = -v;
  return out;
}

VstarReport vstar_report(const TrainRun& run, const PatternSet& ps, int count, RngStream& rng) {
  if (count < 1) throw ParameterError("vstar_report: count must be >= 1");
  const int d = ps.dimension();
  const int k = run.final_params.channels();
  const double eta = run.config.first_lr;
  const double t1 = run.config.first_steps;
  VstarReport rep;
  rep.vstar_norm_bound = 2.0 * 80.0 * 80.0 * d / (k * eta * eta * t1 * t1);
  rep.z_norm_bound = 4.0 * k * eta * eta * t1 * t1;
  rep.product_bound = 51200.0 * d;
  const Vector v = construct_vstar(run.lucky, eta, run.config.first_steps, d, k);
  if (v.empty()) return rep;
  rep.constructible = true;
  rep.vstar_norm_sq = squared_norm(v);
  rep.min_margin = std::numeric_limits<double>::infinity();

  constexpr int kChunk = 1000;
  std::vector<LabeledSample> chunk;
  for (int done = 0; done < count;) {
    const int len = std::min(kChunk, count - done);
    chunk.clear();
    for (int i = 0; i < len; ++i) chunk.push_back(sample_labeled(ps, run.patch_count, rng));
    const Matrix z = z_features(run.final_params.filters, chunk, &ps);
    const Vector margins = matvec_t(z, v);
    Vector norms(static_cast<std::size_t>(len), 0.0);
    for (std::size_t i = 0; i < z.rows(); ++i) {
      const auto row = z.row(i);
      for (std::size_t s = 0; s < row.size(); ++s) norms[s] += row[s] * row[s];
    }
    for (int s = 0; s < len; ++s) {
      const auto si = static_cast<std::size_t>(s);
      rep.min_margin = std::min(rep.min_margin, chunk[si].label * margins[si]);
      rep.max_z_norm_sq = std::max(rep.max_z_norm_sq, norms[si]);
    }
    done += len;
  }
  rep.points = static_cast<std::size_t>(count);
  rep.product = rep.vstar_norm_sq * rep.max_z_norm_sq;
  return rep;
}

namespace {

struct Row {
  std::string section;
  std::string check;
  double observed;
  double limit;
  double slack;
  long checks;
  long violations;
  bool passed;
};

std::vector<Row> rows_of(const TheoryReport& rep) {
  std::vector<Row> rows;
  if (rep.census) {
    const auto& c = *rep.census;
    auto add = [&](const char* name, std::size_t count) {
      const double v = static_cast<double>(count);
      rows.push_back({"census", std::string(name) + "_lower", v, c.lower, v - c.lower, 1,
                      v >= c.lower ? 0 : 1, v >= c.lower});
      rows.push_back({"census", std::string(name) + "_upper", v, c.upper, c.upper - v, 1,
                      v <= c.upper ? 0 : 1, v <= c.upper});
    };
    add("positive_lucky", c.positive);
    add("negative_lucky", c.negative);
  }
  if (rep.dynamics) {
    for (const auto& b : rep.dynamics->bounds) {
      if (!b.recorded) continue;
      rows.push_back({"dynamics", std::string(to_string(b.bound)), 0.0, 0.0, b.worst_slack,
                      b.checks, b.violations, b.violations == 0});
    }
  }
  if (rep.vstar) {
    const auto& v = *rep.vstar;
    if (v.constructible) {
      rows.push_back({"vstar", "min_margin", v.min_margin, 1.0, v.min_margin - 1.0, 1,
                      v.margin_ok() ? 0 : 1, v.margin_ok()});
      rows.push_back({"vstar", "vstar_norm_sq", v.vstar_norm_sq, v.vstar_norm_bound,
                      v.vstar_norm_bound - v.vstar_norm_sq, 1,
                      v.vstar_norm_sq <= v.vstar_norm_bound ? 0 : 1,
                      v.vstar_norm_sq <= v.vstar_norm_bound});
      rows.push_back({"vstar", "max_z_norm_sq", v.max_z_norm_sq, v.z_norm_bound,
                      v.z_norm_bound - v.max_z_norm_sq, 1, v.max_z_norm_sq <= v.z_norm_bound ? 0 : 1,
                      v.max_z_norm_sq <= v.z_norm_bound});
      rows.push_back({"vstar", "norm_product", v.product, v.product_bound,
                      v.product_bound - v.product, 1, v.product_ok() ? 0 : 1, v.product_ok()});
    } else {
      rows.push_back({"vstar", "constructible", 0.0, 1.0, -1.0, 1, 1, false});
    }
  }
  return rows;
}

}  // namespace

void write_theory_csv(std::ostream& out, const TheoryReport& report) {
  out << "section,check,observed,limit,slack,checks,violations,passed\n";
  for (const Row& r : rows_of(report)) {
    out << r.section << ',' << r.check << ',' << format_double(r.observed) << ','
        << format_double(r.limit) << ',' << format_double(r.slack) << ',' << r.checks << ','
        << r.violations << ',' << (r.passed ? 1 : 0) << '\n';
  }
}

void write_theory_text(std::ostream& out, const TheoryReport& report) {
  out << std::setprecision(6);
  if (report.census) {
    const auto& c = *report.census;
    out << "census: k=" << c.channels << " d=" << c.dimension << " positive=" << c.positive
        << " negative=" << c.negative << " range=[" << c.lower << ", " << c.upper
        << "] expected=" << c.expected_fraction * c.channels << " -> "
        << (c.verdict ? "inside" : "OUTSIDE") << '\n';
  }
  if (report.dynamics) {
    const auto& d = *report.dynamics;
    out << "dynamics: " << (d.in_regime ? "in regime" : "out of regime (" + d.regime.describe() + ")")
        << ", S1 positives=" << d.s1_positives << " negatives=" << d.s1_negatives << '\n';
    for (const auto& b : d.bounds) {
      out << "  " << std::left << std::setw(16) << to_string(b.bound) << std::right;
      if (!b.recorded) {
        out << " not recorded\n";
        continue;
      }
      out << " checks=" << b.checks << " violations=" << b.violations
          << " worst_slack=" << b.worst_slack << '\n';
    }
    for (const auto& v : d.violations) {
      out << "  violation " << to_string(v.bound) << " filter=" << v.filter << " step=" << v.step
          << " index=" << v.pattern << " observed=" << v.observed << " limit=" << v.limit
          << " slack=" << v.slack << '\n';
    }
  }
  if (report.vstar) {
    const auto& v = *report.vstar;
    if (!v.constructible) {
      out << "vstar: not constructible (empty lucky set or T1 = 0)\n";
    } else {
      out << "vstar: min margin=" << v.min_margin << " over " << v.points
          << " points, |v*|^2=" << v.vstar_norm_sq << " (bound " << v.vstar_norm_bound
          << "), max|z|^2=" << v.max_z_norm_sq << " (bound " << v.z_norm_bound
          << "), product=" << v.product << " (bound " << v.product_bound << ")\n";
    }
  }
}

}  // namespace poolnet
