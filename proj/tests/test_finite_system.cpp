#include <gtest/gtest.h>

#include "dcube/finite_system.hpp"
#include "helpers.hpp"

using namespace dcube;
using testing_support::load;

TEST(Validate, AcceptsCommutingPermutations) {
  auto rep = validate(PermutationData{6, {{1, 2, 3, 4, 5, 0}, {2, 3, 4, 5, 0, 1}}});
  EXPECT_TRUE(rep.valid());
  EXPECT_EQ(rep.orders, (std::vector<std::uint64_t>{6, 3}));
}

TEST(Validate, RejectsNonBijection) {
  auto rep = validate(PermutationData{3, {{0, 0, 1}}});
  EXPECT_FALSE(rep.valid());
  EXPECT_EQ(rep.bad_generator, 1U);
}

TEST(Validate, RejectsOutOfRange) {
  EXPECT_FALSE(validate(PermutationData{2, {{0, 2}}}).valid());
  EXPECT_FALSE(validate(PermutationData{2, {{0}}}).valid());
}

TEST(Validate, ReportsCommutationWitness) {
  auto rep = validate(PermutationData{4, {{1, 2, 3, 0}, {1, 0, 2, 3}}});
  ASSERT_FALSE(rep.valid());
  ASSERT_TRUE(rep.commutation);
  const auto& f = *rep.commutation;
  std::vector<std::vector<PointId>> p = {{1, 2, 3, 0}, {1, 0, 2, 3}};
  EXPECT_EQ(f.ij, p[f.i - 1][p[f.j - 1][f.x]]);
  EXPECT_EQ(f.ji, p[f.j - 1][p[f.i - 1][f.x]]);
  EXPECT_NE(f.ij, f.ji);
}

TEST(FiniteZdSystem, ConstructorValidates) {
  EXPECT_THROW(FiniteZdSystem(PermutationData{4, {{1, 2, 3, 0}, {1, 0, 2, 3}}}), InvalidArgument);
}

TEST(FiniteZdSystem, PowersMatchRepeatedSteps) {
  auto sys = load("torus3x4.fsys");
  for (unsigned i = 1; i <= 2; ++i)
    for (PointId x = 0; x < sys.size(); ++x)
      for (std::int64_t k = -13; k <= 13; ++k) {
        PointId y = x;
        if (k >= 0)
          y = oracle::step(sys.perm(i), static_cast<std::size_t>(k), x);
        else
          y = oracle::step(sys.perm(i), static_cast<std::size_t>(k % static_cast<std::int64_t>(sys.order(i)) +
                                                                   static_cast<std::int64_t>(sys.order(i))),
                           x);
        EXPECT_EQ(sys.power(i, k, x), y);
      }
}

TEST(FiniteZdSystem, RotationAndTorusHelpers) {
  EXPECT_EQ(FiniteZdSystem::rotation(6, {1, 2}), load("rot6.fsys"));
  EXPECT_EQ(FiniteZdSystem::torus({3, 4}, {{1, 0}, {0, 1}}), load("torus3x4.fsys"));
  EXPECT_EQ(FiniteZdSystem::rotation(12, {1, 3, 4}), load("rot12_d3.fsys"));
}

TEST(FiniteZdSystem, ApplyWordComposes) {
  auto sys = load("rot12_d3.fsys");
  std::vector<std::int64_t> n = {2, -1, 5};
  for (PointId x = 0; x < sys.size(); ++x)
    EXPECT_EQ(sys.apply_word(n, x), (x + 2 - 3 + 20 + 1200) % 12);
  EXPECT_THROW(sys.apply_word(std::vector<std::int64_t>{1}, 0), InvalidArgument);
}

TEST(Minimality, MatchesOracle) {
  for (const auto& name : testing_support::minimal_fixtures()) {
    auto sys = load(name);
    EXPECT_TRUE(is_minimal(sys).minimal) << name;
    EXPECT_EQ(is_minimal(sys).minimal, oracle::minimal(testing_support::perms(sys))) << name;
  }
  for (const auto& name : testing_support::nonminimal_fixtures()) {
    auto sys = load(name);
    auto m = is_minimal(sys);
    EXPECT_FALSE(m.minimal) << name;
    ASSERT_TRUE(m.witness);
    EXPECT_LT(orbit(sys, *m.witness).size(), sys.size());
  }
}

TEST(Orbit, SortedOrbit) {
  auto sys = load("split_4_2.fsys");
  EXPECT_EQ(orbit(sys, 5), (std::vector<PointId>{4, 5}));
  EXPECT_EQ(orbit(sys, 2), (std::vector<PointId>{0, 1, 2, 3}));
}

TEST(PairRelation, SortedAndDeduplicated) {
  PairRelation r(3, {{2, 1}, {0, 0}, {2, 1}});
  EXPECT_EQ(r.size(), 2U);
  EXPECT_TRUE(r.contains(2, 1));
  EXPECT_FALSE(r.contains(1, 2));
  EXPECT_EQ(r.row(2).size(), 1U);
  EXPECT_TRUE(PairRelation::diagonal(4).is_diagonal());
  EXPECT_EQ(PairRelation::full(3).size(), 9U);
  EXPECT_EQ(PairRelation::full(3).intersect(r), r);
  EXPECT_THROW(PairRelation(2, {{0, 2}}), InvalidArgument);
}

TEST(ClosureLabels, OrderedByLeastMember) {
  PairRelation r(5, {{4, 1}, {3, 2}});
  EXPECT_EQ(closure_labels(r), (std::vector<PointId>{0, 1, 2, 2, 1}));
}

TEST(FactorMap, ChecksAndKernel) {
  auto rot6 = load("rot6.fsys");
  auto z2 = FiniteZdSystem::rotation(2, {1, 0});
  FactorMap pi{rot6, z2, {0, 1, 0, 1, 0, 1}};
  EXPECT_TRUE(check_factor_map(pi).ok());
  EXPECT_EQ(kernel(pi).size(), 18U);
  FactorMap bad{rot6, z2, {0, 0, 1, 1, 0, 1}};
  auto rep = check_factor_map(bad);
  EXPECT_FALSE(rep.equivariant);
  EXPECT_TRUE(rep.equivariance_failure);
  auto point = FiniteZdSystem::rotation(1, {0, 0});
  FactorMap second{z2, point, {0, 0}};
  auto composed = compose(pi, second);
  EXPECT_EQ(composed.map, (std::vector<PointId>(6, 0)));
}

TEST(Quotient, ByInvariantRelation) {
  auto sys = load("rot6.fsys");
  // x ~ x + 3
  PairRelation r(6, {{0, 3}, {1, 4}, {2, 5}});
  auto f = quotient(sys, r);
  EXPECT_EQ(f.target.size(), 3U);
  EXPECT_EQ(f.map, (std::vector<PointId>{0, 1, 2, 0, 1, 2}));
  EXPECT_TRUE(check_factor_map(f).ok());
  EXPECT_EQ(f.target, FiniteZdSystem::rotation(3, {1, 2}));
}

TEST(Quotient, RejectsNonInvariantRelation) {
  auto sys = load("rot6.fsys");
  PairRelation r(6, {{0, 1}});
  try {
    quotient(sys, r);
    FAIL() << "expected InvarianceError";
  } catch (const InvarianceError& e) {
    EXPECT_GE(e.failure().generator, 1U);
  }
}

TEST(TextFormat, RoundTripsEveryFixture) {
  auto names = testing_support::minimal_fixtures();
  for (const auto& n : testing_support::nonminimal_fixtures()) names.push_back(n);
  for (const auto& name : names) {
    auto sys = load(name);
    EXPECT_EQ(load_system(format_system(sys)), sys) << name;
  }
}

TEST(TextFormat, ReportsLineNumbers) {
  try {
    load_system(testing_support::read_fixture("invalid/noncommuting.fsys"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6U);
  }
  auto expect_line = [](std::string_view text, std::size_t line) {
    try {
      parse_system(text);
      ADD_FAILURE() << "expected ParseError for:\n" << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << e.what();
    }
  };
  expect_line("finite-system\npoints = 2\nd = 1\nT1 = [1, 0]\nT1 = [0, 1]\n", 5);
  expect_line("finite-system\npoints = 2\nd = 1\nbogus = 3\n", 4);
  expect_line("finite-system\npoints = 2\nd = 1\nT1 = [1, x]\n", 4);
  expect_line("systems\n", 1);
  expect_line("finite-system\npoints = 2\nd = 1\nT2 = [1, 0]\nT1 = [1, 0]\n", 4);
}

TEST(TextFormat, RelationRoundTrip) {
  PairRelation r(4, {{0, 1}, {3, 3}, {2, 0}});
  EXPECT_EQ(parse_relation(format_relation(r)), r);
  EXPECT_THROW(parse_relation("pair-relation n=2\n0,2\n"), ParseError);
}
