#include "poolnet/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "poolnet/errors.hpp"

namespace poolnet {

PatternSet::PatternSet(Matrix patterns, OrthoMode mode)
    : patterns_(std::move(patterns)), mode_(mode) {
  const auto l = patterns_.rows();
  const auto d = patterns_.cols();
  if (l < 3 || l > d) {
    throw DimensionError("PatternSet: need 3 <= l <= d, got l=" + std::to_string(l) +
                         " d=" + std::to_string(d));
  }
  for (std::size_t i = 0; i < l; ++i) {
    if (std::abs(norm(patterns_.row(i)) - 1.0) > 1e-12) {
      throw ParameterError("PatternSet: pattern " + std::to_string(i) + " is not unit norm");
    }
    for (std::size_t j = i + 1; j < l; ++j) {
      if (std::abs(dot(patterns_.row(i), patterns_.row(j))) > 1e-10) {
        throw ParameterError("PatternSet: patterns " + std::to_string(i) + " and " +
                             std::to_string(j) + " are not orthogonal");
      }
    }
  }
}

PatternSet PatternSet::sample(int d, int l, RngStream& rng, OrthoMode mode) {
  return PatternSet(random_orthonormal(d, l, rng, mode), mode);
}

std::span<const double> PatternSet::pattern(int id) const {
  if (id < 0 || id >= count()) throw ParameterError("PatternSet: bad pattern id " + std::to_string(id));
  return patterns_.row(static_cast<std::size_t>(id));
}

bool LabeledSample::contains_pattern(int id) const {
  return std::find(slot_pattern_ids.begin(), slot_pattern_ids.end(), id) != slot_pattern_ids.end();
}

int Dataset::positives() const {
  return static_cast<int>(std::count_if(samples.begin(), samples.end(),
                                        [](const LabeledSample& s) { return s.label > 0; }));
}

int Dataset::negatives() const { return static_cast<int>(size()) - positives(); }

LabeledSample sample_labeled(const PatternSet& ps, int n, RngStream& rng) {
  if (n < 1) throw ParameterError("sample_labeled: need n >= 1");
  const auto d = static_cast<std::size_t>(ps.dimension());
  LabeledSample s;
  s.label = rng.sign();
  s.discriminative_slot = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
  s.slot_pattern_ids.resize(static_cast<std::size_t>(n));
  s.patches = Matrix(static_cast<std::size_t>(n), d);
  const auto spurious = static_cast<std::uint64_t>(ps.spurious_count());
  for (int j = 0; j < n; ++j) {
    int id = 0;
    if (j == s.discriminative_slot) {
      id = s.label > 0 ? kPositivePattern : kNegativePattern;
    } else {
      id = 2 + static_cast<int>(rng.uniform_index(spurious));
    }
    s.slot_pattern_ids[static_cast<std::size_t>(j)] = id;
    auto src = ps.pattern(id);
    std::copy(src.begin(), src.end(), s.patches.row(static_cast<std::size_t>(j)).begin());
  }
  return s;
}

LabeledSample add_noise(const LabeledSample& s, double rho, RngStream& rng) {
  if (!(rho >= 0.0)) throw ParameterError("add_noise: radius must be non-negative");
  LabeledSample out = s;
  out.noise_radius = rho;
  if (rho == 0.0) return out;
  const int d = static_cast<int>(s.patches.cols());
  for (std::size_t j = 0; j < out.patches.rows(); ++j) {
    const Vector v = sample_ball(d, rho, rng);
    axpy(1.0, v, out.patches.row(j));
  }
  return out;
}

Dataset sample_dataset(std::shared_ptr<const PatternSet> ps, int n, int m, RngStream& rng,
                       double rho) {
  if (!ps) throw ParameterError("sample_dataset: missing pattern set");
  if (m < 0) throw ParameterError("sample_dataset: negative sample count");
  if (!(rho >= 0.0)) throw ParameterError("sample_dataset: noise radius must be non-negative");
  Dataset ds;
  ds.patch_count = n;
  ds.noise_radius = rho;
  ds.seed = rng.seed();
  ds.samples.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    LabeledSample s = sample_labeled(*ps, n, rng);
    if (rho > 0.0) s = add_noise(s, rho, rng);
    ds.samples.push_back(std::move(s));
  }
  ds.patterns = std::move(ps);
  return ds;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& s) {
  if (s.size() < 2) throw ParameterError("split_dataset: need at least 2 samples");
  const std::size_t first = (s.size() + 1) / 2;
  Dataset a = s;
  Dataset b = s;
  a.samples.assign(s.samples.begin(), s.samples.begin() + static_cast<std::ptrdiff_t>(first));
  b.samples.assign(s.samples.begin() + static_cast<std::ptrdiff_t>(first), s.samples.end());
  return {std::move(a), std::move(b)};
}

Vector pattern_stats(const Dataset& s) {
  if (s.empty()) throw ParameterError("pattern_stats: empty dataset");
  if (!s.patterns) throw ParameterError("pattern_stats: missing pattern set");
  const auto l = static_cast<std::size_t>(s.patterns->count());
  std::vector<long> signed_counts(l, 0);
  std::vector<char> seen(l);
  for (const auto& x : s.samples) {
    std::fill(seen.begin(), seen.end(), 0);
    for (int id : x.slot_pattern_ids) {
      if (id < 0 || static_cast<std::size_t>(id) >= l) {
        throw ParameterError("pattern_stats: sample references unknown pattern " + std::to_string(id));
      }
      seen[static_cast<std::size_t>(id)] = 1;
    }
    for (std::size_t i = 0; i < l; ++i)
      if (seen[i]) signed_counts[i] += x.label;
  }
  Vector stats(l);
  const double m = static_cast<double>(s.size());
  for (std::size_t i = 0; i < l; ++i) stats[i] = static_cast<double>(signed_counts[i]) / m;
  return stats;
}

Vector difference_separator(const PatternSet& ps, int n) {
  if (n < 1) throw ParameterError("difference_separator: need n >= 1");
  const auto d = static_cast<std::size_t>(ps.dimension());
  Vector w(static_cast<std::size_t>(n) * d);
  auto pos = ps.pattern(kPositivePattern);
  auto neg = ps.pattern(kNegativePattern);
  for (int j = 0; j < n; ++j)
    for (std::size_t c = 0; c < d; ++c) w[static_cast<std::size_t>(j) * d + c] = pos[c] - neg[c];
  return w;
}

}  // namespace poolnet
