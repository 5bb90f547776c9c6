#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "poolnet/dataset_io.hpp"
#include "poolnet/patch_batch.hpp"
#include "poolnet/patterns.hpp"

using namespace poolnet;

namespace {

std::shared_ptr<const PatternSet> basis(int d, int l) {
  RngStream r(0);
  return std::make_shared<const PatternSet>(PatternSet::sample(d, l, r, OrthoMode::StandardBasis));
}

}  // namespace

TEST(Patterns, ValidatesShape) {
  RngStream r(1);
  EXPECT_THROW(PatternSet::sample(5, 2, r), DimensionError);
  EXPECT_THROW(PatternSet::sample(5, 6, r), DimensionError);
  Matrix bad(3, 3, 0.0);
  bad(0, 0) = bad(1, 1) = 1.0;
  bad(2, 2) = 2.0;
  EXPECT_THROW(PatternSet{bad}, ParameterError);
}

TEST(Patterns, SampleStructure) {
  RngStream r(2);
  const PatternSet ps = PatternSet::sample(8, 6, r);
  for (int t = 0; t < 500; ++t) {
    const LabeledSample s = sample_labeled(ps, 5, r);
    const int cls = s.label > 0 ? kPositivePattern : kNegativePattern;
    const int other = s.label > 0 ? kNegativePattern : kPositivePattern;
    ASSERT_EQ(s.slot_pattern_ids.size(), 5u);
    EXPECT_EQ(s.slot_pattern_ids[static_cast<std::size_t>(s.discriminative_slot)], cls);
    EXPECT_EQ(std::count(s.slot_pattern_ids.begin(), s.slot_pattern_ids.end(), cls), 1);
    EXPECT_FALSE(s.contains_pattern(other));
    for (int j = 0; j < 5; ++j) {
      const int id = s.slot_pattern_ids[static_cast<std::size_t>(j)];
      if (j != s.discriminative_slot) EXPECT_TRUE(ps.is_spurious(id));
      EXPECT_EQ(max_abs_diff(s.patches.row(static_cast<std::size_t>(j)), ps.pattern(id)), 0.0);
    }
  }
}

TEST(Patterns, NoiseStaysInBall) {
  RngStream r(3);
  const PatternSet ps = PatternSet::sample(6, 4, r);
  const LabeledSample s = sample_labeled(ps, 4, r);
  const LabeledSample noisy = add_noise(s, 0.7, r);
  for (std::size_t j = 0; j < 4; ++j) {
    Vector diff(noisy.patches.row(j).begin(), noisy.patches.row(j).end());
    axpy(-1.0, s.patches.row(j), diff);
    EXPECT_LE(norm(diff), 0.7 + 1e-12);
  }
  EXPECT_EQ(noisy.slot_pattern_ids, s.slot_pattern_ids);
}

TEST(Patterns, StatsMatchRecount) {
  RngStream r(4);
  const auto ps = basis(10, 7);
  const Dataset ds = sample_dataset(ps, 6, 300, r);
  const Vector s = pattern_stats(ds);
  for (int i = 0; i < 7; ++i) {
    long numer = 0;
    for (const auto& x : ds.samples) numer += x.contains_pattern(i) ? x.label : 0;
    EXPECT_EQ(s[static_cast<std::size_t>(i)], static_cast<double>(numer) / 300.0);
  }
  EXPECT_GE(s[kPositivePattern], 0.0);
  EXPECT_LE(s[kNegativePattern], 0.0);
}

TEST(Patterns, SpuriousPatternsAreUnbiased) {
  RngStream r(5);
  const auto ps = basis(8, 8);
  const Dataset ds = sample_dataset(ps, 4, 100000, r);
  const Vector s = pattern_stats(ds);
  for (int i = 2; i < 8; ++i) EXPECT_LE(std::abs(s[static_cast<std::size_t>(i)]), 0.01);
}

TEST(Patterns, DifferenceSeparatorHasUnitMargin) {
  RngStream r(6);
  const auto ps = basis(12, 9);
  const Dataset ds = sample_dataset(ps, 7, 200, r);
  const Vector w = difference_separator(*ps, 7);
  EXPECT_EQ(squared_norm(w), 14.0);
  for (const auto& s : ds.samples) EXPECT_EQ(s.label * dot(w, s.flat()), 1.0);
}

TEST(Patterns, SplitHalves) {
  RngStream r(7);
  const Dataset ds = sample_dataset(basis(5, 4), 3, 11, r);
  const auto [a, b] = split_dataset(ds);
  EXPECT_EQ(a.size(), 6u);
  EXPECT_EQ(b.size(), 5u);
  EXPECT_EQ(a.samples[0].slot_pattern_ids, ds.samples[0].slot_pattern_ids);
  EXPECT_EQ(b.samples[0].slot_pattern_ids, ds.samples[6].slot_pattern_ids);
}

TEST(DatasetIo, RoundTripIsByteIdentical) {
  for (double rho : {0.0, 0.5}) {
    RngStream r(8);
    auto ps = std::make_shared<const PatternSet>(PatternSet::sample(6, 5, r));
    const Dataset ds = sample_dataset(ps, 4, 20, r, rho);
    std::stringstream first;
    write_dataset(first, ds);
    const Dataset back = read_dataset(first);
    std::stringstream second;
    write_dataset(second, back);
    EXPECT_EQ(first.str(), second.str());
    EXPECT_EQ(back.samples[3].patches, ds.samples[3].patches);
  }
}

TEST(DatasetIo, RejectsMalformedInput) {
  std::stringstream bad("poolnet-dataset 9\n");
  EXPECT_THROW(read_dataset(bad), FormatError);
  std::stringstream truncated("poolnet-dataset 1\nd 4\nn 2\n");
  EXPECT_THROW(read_dataset(truncated), FormatError);
}

TEST(PatchBatch, NoiselessDataSharesPatternRows) {
  RngStream r(9);
  const auto ps = basis(10, 6);
  const Dataset ds = sample_dataset(ps, 5, 50, r);
  const PatchBatch b = PatchBatch::from_samples(ds.samples, ps.get());
  EXPECT_EQ(b.table.rows(), 6u);
  for (std::size_t s = 0; s < 50; ++s) {
    EXPECT_EQ(b.flat(s), Vector(ds.samples[s].flat().begin(), ds.samples[s].flat().end()));
  }
  const std::vector<int> pick{3, 7};
  const PatchBatch sub = b.select(pick);
  EXPECT_EQ(sub.samples(), 2u);
  EXPECT_LE(sub.table.rows(), 6u);
  EXPECT_EQ(sub.flat(1), b.flat(7));
}
