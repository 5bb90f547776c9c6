#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "poolnet/detectors.hpp"
#include "poolnet/psi.hpp"
#include "poolnet/vc.hpp"

using namespace poolnet;

namespace {

CnnParams from_patterns(const PatternSet& ps, std::vector<std::pair<int, double>> spec) {
  CnnParams p;
  p.filters = Matrix(spec.size(), static_cast<std::size_t>(ps.dimension()));
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto o = ps.pattern(spec[i].first);
    std::copy(o.begin(), o.end(), p.filters.row(i).begin());
    p.readout.push_back(spec[i].second);
  }
  return p;
}

}  // namespace

TEST(Psi, FilterEqualToPositivePatternDetectsIt) {
  RngStream r(1);
  const PatternSet ps = PatternSet::sample(5, 5, r);
  const CnnParams p = from_patterns(ps, {{kPositivePattern, 1.0}});
  const DetectorAssignment a = detector_assignment(p, ps);
  EXPECT_EQ(a.pattern[0], kPositivePattern);
  EXPECT_EQ(a.group[0], DetectorGroup::Positive);
}

TEST(Psi, NegativeFilterIsUndetecting) {
  RngStream r(2);
  const PatternSet ps = PatternSet::sample(4, 4, r, OrthoMode::StandardBasis);
  CnnParams p;
  p.filters = Matrix(1, 4, {-1.0, -1.0, -1.0, -1.0});
  p.readout = {1.0};
  EXPECT_EQ(detector_assignment(p, ps).group[0], DetectorGroup::Undetecting);
  EXPECT_EQ(detector_assignment(p, ps).pattern[0], -1);
}

TEST(Psi, AssignmentMatchesLuckySetsAtInit) {
  RngStream r(3);
  const PatternSet ps = PatternSet::sample(6, 6, r);
  const CnnParams p = init_cnn(2000, 6, 1.0, r);
  const DetectorAssignment a = detector_assignment(p, ps);
  const LuckySets lucky = lucky_sets(p, ps);
  std::vector<int> pos, neg;
  for (std::size_t i = 0; i < a.pattern.size(); ++i) {
    if (a.group[i] == DetectorGroup::Positive && a.pattern[i] == kPositivePattern) pos.push_back(static_cast<int>(i));
    if (a.group[i] == DetectorGroup::Negative && a.pattern[i] == kNegativePattern) neg.push_back(static_cast<int>(i));
  }
  EXPECT_EQ(pos, lucky.positive);
  EXPECT_EQ(neg, lucky.negative);
}

TEST(Psi, VcNetworkDetectorsHitTheirSpuriousPatterns) {
  RngStream r(4);
  const PatternSet ps = PatternSet::sample(8, 8, r);
  const std::vector<int> y{1, -1, -1, 1, 1, 1, -1, -1};
  const ShatterInstance inst = vc_build_and_verify(y, ps);
  const DetectorAssignment a = detector_assignment(inst.network, ps);
  for (std::size_t i = 0; i < a.pattern.size(); ++i) {
    if (norm(inst.network.filters.row(i)) == 0.0) {
      EXPECT_EQ(a.group[i], DetectorGroup::Undetecting);
      continue;
    }
    EXPECT_TRUE(ps.is_spurious(a.pattern[i])) << i;
  }
}

TEST(Psi, OnlyPositiveDetectorsGiveZeroRatios) {
  RngStream r(5);
  const PatternSet ps = PatternSet::sample(5, 5, r);
  const CnnParams p = from_patterns(ps, {{kPositivePattern, 1.0}, {kPositivePattern, 1.0}});
  const DetectionRatios ratios = detection_ratios(p, ps);
  ASSERT_TRUE(ratios.plus_defined);
  EXPECT_FALSE(ratios.minus_defined);
  for (int i = 2; i < 5; ++i) EXPECT_EQ(*ratios.plus[static_cast<std::size_t>(i)], 0.0);
  EXPECT_FALSE(ratios.plus[kNegativePattern].has_value());
  EXPECT_EQ(ratios.max_ratio(), 0.0);
}

TEST(Psi, HandComputedStrengths) {
  RngStream r(6);
  const PatternSet ps = PatternSet::sample(4, 4, r, OrthoMode::StandardBasis);
  CnnParams p;
  p.filters = Matrix(3, 4, {2.0, 0.0, 0.0, 0.0,    // a=+1: detects 0 with 2
                            0.0, 0.0, 0.5, 0.0,    // a=-1: detects 2 with 0.5 in both views
                            0.0, 3.0, 0.0, 0.0});  // a=-1: negative view 1 with 3
  p.readout = {1.0, -1.0, -2.0};
  const DetectionStrengths s = detection_strengths(p, ps);
  EXPECT_EQ(s.plus_pos[0], 2.0);
  EXPECT_EQ(s.plus_neg[2], 0.5);
  EXPECT_EQ(s.minus_neg[1], 6.0);
  EXPECT_EQ(s.minus_neg[2], 0.5);
  const DetectionRatios ratios = detection_ratios(s);
  EXPECT_DOUBLE_EQ(*ratios.plus[2], 0.25);
  EXPECT_DOUBLE_EQ(*ratios.minus[2], 0.0);
}

TEST(Psi, RatiosAreScaleInvariant) {
  RngStream r(7);
  const PatternSet ps = PatternSet::sample(6, 6, r);
  CnnParams p = init_cnn(500, 6, 1.0, r);
  const DetectionRatios before = detection_ratios(p, ps);
  for (double& v : p.filters.values()) v *= 4.0;
  const DetectionRatios after = detection_ratios(p, ps);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(before.plus[i], after.plus[i]);
    EXPECT_EQ(before.minus[i], after.minus[i]);
  }
}

TEST(Psi, CheckArithmetic) {
  DetectionRatios ratios;
  ratios.plus = {0.0, std::nullopt, 0.1};
  ratios.minus = {std::nullopt, 0.0, 0.0};
  ratios.plus_defined = ratios.minus_defined = true;
  const Vector s{0.5, -0.5, 0.0};
  const PsiCheck c = psi_check(ratios, s, 100, 1.0, 1.0);
  ASSERT_EQ(c.terms.size(), 4u);
  EXPECT_DOUBLE_EQ(c.bounds[1], 0.1);
  EXPECT_TRUE(c.all());
  EXPECT_DOUBLE_EQ(c.worst_slack, 0.0);
  EXPECT_THROW(psi_check(ratios, Vector{0.0, -0.5, 0.0}, 100, 1.0, 1.0), ParameterError);
  std::stringstream ss;
  write_psi_csv_header(ss);
  write_psi_csv_rows(ss, 9, c);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "seed,pattern,side,ratio,bound,satisfied");
  std::getline(ss, line);
  EXPECT_EQ(line.rfind("9,0,plus,", 0), 0u);
}

TEST(Psi, StatTermUsesReferenceStatistic) {
  DetectionRatios ratios;
  ratios.plus = {0.0, std::nullopt, 0.3};
  ratios.minus = {std::nullopt, 0.0, 0.3};
  ratios.plus_defined = ratios.minus_defined = true;
  // s_2 = -0.2: plus side max(0.2/0.4, 0) = 0.5; minus side max(0.2/-0.5, 0) = 0.
  const auto terms = psi_terms(ratios, Vector{0.4, -0.5, -0.2}, 4);
  ASSERT_EQ(terms.size(), 4u);
  EXPECT_DOUBLE_EQ(terms[1].stat_term, 0.5);
  EXPECT_DOUBLE_EQ(terms[3].stat_term, 0.0);
  EXPECT_DOUBLE_EQ(terms[3].sample_term, 0.5);
}

TEST(Psi, FitFloorsAtOne) {
  std::vector<PsiTerm> zeros{{2, true, 0.0, 0.0, 0.1}, {3, false, 0.0, 0.4, 0.1}};
  const PsiFit f = psi_fit({zeros});
  EXPECT_EQ(f.b, 1.0);
  EXPECT_EQ(f.c, 1.0);
}

TEST(Psi, FitMatchesHandSolvedLp) {
  // b + c/2 >= 3 and b/5 + c >= 2: the optimum is the intersection
  // (20/9, 14/9); the axis vertices (5, 1) and (1, 4) cost more.
  const std::vector<PsiTerm> run1{{2, true, 3.0, 1.0, 0.5}};
  const std::vector<PsiTerm> run2{{3, true, 2.0, 0.2, 1.0}};
  const PsiFit f = psi_fit({run1, run2});
  EXPECT_NEAR(f.b, 20.0 / 9.0, 1e-12);
  EXPECT_NEAR(f.c, 14.0 / 9.0, 1e-12);
  for (const auto& t : {run1[0], run2[0]}) {
    EXPECT_LE(t.ratio, f.b * t.stat_term + f.c * t.sample_term + 1e-12);
  }
}

TEST(Psi, CertificateArithmetic) {
  const PsiCertificate big = psi_certificate(1.0, 1.0, 10, 1000000, 0.05, 0.0);
  EXPECT_NEAR(big.threshold, 300.0 * 100.0 * std::log(10.0), 1e-9);
  EXPECT_NEAR(big.threshold, 69077.55, 0.01);
  EXPECT_TRUE(big.certified);
  EXPECT_FALSE(psi_certificate(1.0, 1.0, 10, 100, 0.05, 0.0).certified);
  const PsiCertificate small_b = psi_certificate(0.5, 1.0, 10, 100000000, 0.05, 0.0);
  EXPECT_FALSE(small_b.applicable);
  EXPECT_FALSE(small_b.certified);
}
