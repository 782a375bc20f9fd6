#include <gtest/gtest.h>

#include "dcube/structure.hpp"
#include "helpers.hpp"

using namespace dcube;
using testing_support::load;
using testing_support::perms;

namespace {

std::vector<std::string> closing_fixtures() {
  std::vector<std::string> out;
  for (const auto& n : testing_support::minimal_fixtures())
    if (load(n).dim() >= 2) out.push_back(n);
  return out;
}

}  // namespace

TEST(Subgroup, Description) {
  SubgroupSpec h{{1}, {{1, 2}}};
  EXPECT_EQ(h.str(), "<T1,[1,2]>");
  EXPECT_EQ(SubgroupSpec::trivial(2).str(), "<[0,0]>");
  EXPECT_EQ(product(SubgroupSpec::of({1}), SubgroupSpec::of({2})).generators, (std::vector<unsigned>{1, 2}));
}

TEST(Subgroup, OrbitRelationMatchesOracle) {
  auto names = testing_support::minimal_fixtures();
  for (const auto& n : testing_support::nonminimal_fixtures()) names.push_back(n);
  for (const auto& name : names) {
    auto sys = load(name);
    auto p = perms(sys);
    for (unsigned j = 1; j <= sys.dim(); ++j) {
      auto rel = compute_QH(sys, SubgroupSpec::of({j}));
      oracle::Pairs expected;
      for (PointId x = 0; x < sys.size(); ++x)
        for (auto y : oracle::orbit({p[j - 1]}, x)) expected.emplace(x, y);
      EXPECT_EQ(oracle::Pairs(rel.pairs().begin(), rel.pairs().end()), expected) << name << " j=" << j;
    }
  }
}

TEST(Subgroup, WordsAndTrivialGroup) {
  auto sys = load("rot12_d3.fsys");
  // T1^4 T3^{-1} is the identity on Z/12.
  SubgroupSpec h{{}, {{4, 0, -1}}};
  EXPECT_TRUE(acts_trivially(sys, h));
  EXPECT_TRUE(compute_QH(sys, h).is_diagonal());
  EXPECT_FALSE(acts_trivially(sys, SubgroupSpec::of({2})));
  EXPECT_THROW(compute_QH(sys, SubgroupSpec{{4}, {}}), InvalidArgument);
  EXPECT_THROW(compute_QH(sys, SubgroupSpec{{}, {{1, 2}}}), InvalidArgument);
}

TEST(Subgroup, QuotientFactor) {
  auto sys = load("rot6.fsys");
  auto f = maximal_Z0H_factor(sys, SubgroupSpec::of({2}));
  EXPECT_EQ(f.map.target.size(), 2U);
  EXPECT_TRUE(f.subgroup_trivial_on_quotient);
  EXPECT_TRUE(f.equivalence.holds());
  EXPECT_TRUE(f.hypotheses_met);
  EXPECT_FALSE(kernel_misses(f.map, compute_QH(sys, SubgroupSpec::of({2}))));
  EXPECT_TRUE(kernel_misses(f.map, compute_QH(sys, SubgroupSpec::of({1}))));
}

TEST(Subgroup, IteratedQuotients) {
  for (const auto& name : {"rot12_d3.fsys", "torus4_d3.fsys", "split_4_2.fsys", "cube2_d3.fsys"}) {
    auto sys = load(name);
    const unsigned d = sys.dim();
    for (unsigned a = 1; a <= d; ++a)
      for (unsigned b = 1; b <= d; ++b) {
        auto v = iterated_quotient_check(sys, SubgroupSpec::of({a}), SubgroupSpec::of({b}));
        EXPECT_TRUE(v.equal) << name << " " << a << "," << b;
        EXPECT_EQ(v.direct_classes, v.iterated_classes);
      }
  }
}

TEST(Decompose, RequiresClosingProperty) {
  EXPECT_THROW(decompose(load("rot5_d1.fsys"), 0), HypothesisUnmet);
  EXPECT_THROW(decompose(load("two_rot3.fsys"), 0), HypothesisUnmet);
  auto dec = decompose_unchecked(load("two_rot3.fsys"), 0);
  EXPECT_FALSE(dec.base_minimal);
  auto v = relative_independence_check(dec, load("two_rot3.fsys"));
  EXPECT_EQ(v.status, CheckStatus::HypothesesUnmet);
}

TEST(Decompose, EmbedsIntoFactorProduct) {
  for (const auto& name : closing_fixtures()) {
    auto sys = load(name);
    auto dec = decompose(sys, 0);
    EXPECT_TRUE(dec.injective) << name;
    EXPECT_TRUE(dec.section_matches) << name;
    EXPECT_EQ(dec.k.size(), oracle::rooted(perms(sys), 0).size()) << name;
    ASSERT_EQ(dec.factors.size(), sys.dim());
    for (unsigned j = 1; j <= sys.dim(); ++j) {
      std::vector<unsigned> rest;
      oracle::Perms rest_perms;
      for (unsigned i = 1; i <= sys.dim(); ++i)
        if (i != j) {
          rest.push_back(i);
          rest_perms.push_back(sys.perm(i));
        }
      EXPECT_EQ(dec.factors[j - 1].points.size(), oracle::rooted(rest_perms, 0).size()) << name << " j=" << j;
      EXPECT_TRUE(check_factor_map({dec.y, dec.factors[j - 1].system, dec.factors[j - 1].map}).ok())
          << name << " j=" << j;
      auto iso = factor_isomorphism_check(sys, 0, j);
      EXPECT_TRUE(iso.holds()) << name << " j=" << j << ": " << iso.witness;
    }
    auto ind = relative_independence_check(dec, sys);
    EXPECT_EQ(ind.status, CheckStatus::Pass) << name;
    EXPECT_GT(ind.candidates, 0U);
  }
}

TEST(Decompose, IndependentOfBasePointAndThreads) {
  auto sys = load("torus3x4.fsys");
  EngineOptions many;
  many.threads = 8;
  for (PointId x0 : {0U, 5U, 11U}) {
    auto a = decompose(sys, x0);
    auto b = decompose(sys, x0, many);
    EXPECT_EQ(a.k, b.k);
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(a.k.size(), 144U / 12U);
  }
}

TEST(StructureBattery, PassesOnClosingFixtures) {
  for (const auto& name : closing_fixtures()) {
    auto sys = load(name);
    for (const auto& c : structure_battery(sys, 0)) EXPECT_TRUE(c.passed()) << name << ": " << c.name << " " << c.detail;
  }
}
