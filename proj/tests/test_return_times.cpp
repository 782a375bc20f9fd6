#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "dcube/cube_engine.hpp"
#include "dcube/return_times.hpp"
#include "helpers.hpp"

using namespace dcube;
using testing_support::load;
using testing_support::perms;

namespace {

PeriodicSet random_set(std::mt19937& rng, unsigned k, std::uint64_t max_mod) {
  std::vector<std::uint64_t> moduli(k);
  for (auto& m : moduli) m = 1 + rng() % max_mod;
  std::vector<std::vector<std::int64_t>> residues;
  std::uint64_t cells = std::accumulate(moduli.begin(), moduli.end(), std::uint64_t{1}, std::multiplies<>());
  for (std::uint64_t c = 0; c < cells; ++c) {
    if (rng() % 3) continue;
    std::vector<std::int64_t> r(k);
    std::uint64_t rest = c;
    for (unsigned i = k; i-- > 0;) {
      r[i] = static_cast<std::int64_t>(rest % moduli[i]);
      rest /= moduli[i];
    }
    residues.push_back(r);
  }
  return PeriodicSet(moduli, residues);
}

// Calls fn on every n in [0, m)^k.
void for_box(unsigned k, std::int64_t m, const std::function<void(const std::vector<std::int64_t>&)>& fn) {
  std::vector<std::size_t> bounds(k, static_cast<std::size_t>(m));
  oracle::for_each_exponent(bounds, [&](const std::vector<std::size_t>& n) {
    fn(std::vector<std::int64_t>(n.begin(), n.end()));
  });
}

std::vector<std::int64_t> without(const std::vector<std::int64_t>& n, std::size_t i) {
  auto out = n;
  out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
  return out;
}

std::int64_t common_period(std::span<const PeriodicSet> sets) {
  std::uint64_t l = 1;
  for (const auto& s : sets)
    for (auto m : s.moduli()) l = std::lcm(l, m);
  return static_cast<std::int64_t>(l);
}

}  // namespace

TEST(PeriodicSet, CanonicalForm) {
  // {n : n even} written with period 4.
  PeriodicSet a({4}, {{0}, {2}});
  EXPECT_EQ(a.moduli(), (std::vector<std::uint64_t>{2}));
  EXPECT_EQ(a, PeriodicSet({2}, {{0}}));
  EXPECT_EQ(PeriodicSet({2, 3}, {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}}), PeriodicSet::full(2));
  EXPECT_TRUE(PeriodicSet::empty(3).empty());
  EXPECT_EQ(PeriodicSet({5}, {{-1}}).residues(), (std::vector<std::vector<std::int64_t>>{{4}}));
  EXPECT_TRUE(a.contains(std::vector<std::int64_t>{-6}));
  EXPECT_FALSE(a.contains(std::vector<std::int64_t>{7}));
  EXPECT_THROW(PeriodicSet({0}, {}), InvalidArgument);
}

TEST(PeriodicSet, SetAlgebraMatchesPointwise) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_set(rng, 2, 6), b = random_set(rng, 2, 6);
    std::vector<PeriodicSet> both = {a, b};
    auto l = common_period(both);
    auto i = intersect(a, b);
    bool any = false, sub = true;
    for_box(2, l, [&](const std::vector<std::int64_t>& n) {
      bool in = a.contains(n) && b.contains(n);
      EXPECT_EQ(i.contains(n), in);
      any = any || in;
      sub = sub && (!a.contains(n) || b.contains(n));
    });
    EXPECT_EQ(intersects(a, b), any);
    EXPECT_EQ(is_subset(a, b), sub);
    auto w = first_outside(a, b);
    EXPECT_EQ(w.has_value(), !sub);
    if (w) {
      EXPECT_TRUE(a.contains(*w));
      EXPECT_FALSE(b.contains(*w));
    }
  }
}

TEST(PeriodicSet, CartesianProductAndDrop) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_set(rng, 1, 5), b = random_set(rng, 2, 4);
    auto p = cartesian_product(a, b);
    EXPECT_EQ(p.k(), 3U);
    std::vector<PeriodicSet> both = {a, b};
    for_box(3, common_period(both), [&](const std::vector<std::int64_t>& n) {
      EXPECT_EQ(p.contains(n), a.contains(std::vector<std::int64_t>{n[0]}) &&
                                   b.contains(std::vector<std::int64_t>{n[1], n[2]}));
    });
    EXPECT_EQ(drop_coordinate(cartesian_product(PeriodicSet::full(1), b), 1), b);
  }
  EXPECT_THROW(drop_coordinate(PeriodicSet({2, 1}, {{0, 0}}), 1), InvalidArgument);
}

TEST(PeriodicSet, ZeroVector) {
  EXPECT_TRUE(contains_zero_vector(PeriodicSet({3, 3}, {{0, 0}})));
  EXPECT_FALSE(contains_zero_vector(PeriodicSet({3, 3}, {{1, 0}})));
}

TEST(Joining, TwoJoiningIsCartesianProduct) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<PeriodicSet> sets = {random_set(rng, 1, 8), random_set(rng, 1, 8)};
    // Removing coordinate 1 leaves n_2, which must lie in the first set.
    EXPECT_EQ(d_joining(sets), cartesian_product(sets[1], sets[0]));
  }
}

TEST(Joining, MatchesPointwiseDefinition) {
  std::mt19937 rng(9);
  for (unsigned d = 2; d <= 4; ++d)
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<PeriodicSet> sets;
      for (unsigned i = 0; i < d; ++i) sets.push_back(random_set(rng, d - 1, d == 4 ? 2 : 4));
      auto j = d_joining(sets);
      auto l = common_period(sets);
      for_box(d, l, [&](const std::vector<std::int64_t>& n) {
        bool in = true;
        for (unsigned i = 0; i < d; ++i) in = in && sets[i].contains(without(n, i));
        EXPECT_EQ(j.contains(n), in);
      });
    }
}

TEST(Joining, ParityJoiningIsEmpty) {
  auto even = parse_periodic_set(testing_support::read_fixture("parityB1.pset"));
  auto odd = parse_periodic_set(testing_support::read_fixture("parityB2.pset"));
  std::vector<PeriodicSet> sets = {even, even, odd};
  EXPECT_TRUE(d_joining(sets).empty());
  // Each pair of sets on its own still admits solutions.
  for (const auto& s : sets) EXPECT_FALSE(s.empty());
  std::vector<PeriodicSet> all_even = {even, even, even};
  EXPECT_FALSE(d_joining(all_even).empty());
}

TEST(Joining, MonotoneAndCommutesWithIntersection) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<PeriodicSet> a, b, ab, bigger;
    for (int i = 0; i < 3; ++i) {
      a.push_back(random_set(rng, 2, 4));
      b.push_back(random_set(rng, 2, 4));
      ab.push_back(intersect(a.back(), b.back()));
      bigger.push_back(PeriodicSet::full(2));
    }
    EXPECT_EQ(d_joining(ab), intersect(d_joining(a), d_joining(b)));
    EXPECT_TRUE(is_subset(d_joining(a), d_joining(bigger)));
    EXPECT_EQ(d_joining(bigger), PeriodicSet::full(3));
  }
}

TEST(Joining, ThreadCountDoesNotChangeResult) {
  std::mt19937 rng(17);
  EngineOptions many;
  many.threads = 8;
  std::vector<PeriodicSet> sets;
  for (int i = 0; i < 4; ++i) sets.push_back(random_set(rng, 3, 6));
  EXPECT_EQ(d_joining(sets), d_joining(sets, many));
}

TEST(Phi, SumOfCoordinates) {
  EXPECT_EQ(phi_image(PeriodicSet({6, 6}, {{1, 2}})), PeriodicSet({6}, {{3}}));
  auto full = PeriodicSet({2, 3}, {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}});
  EXPECT_EQ(phi_image(full), PeriodicSet::full(1));
  EXPECT_EQ(phi_image(full).moduli(), (std::vector<std::uint64_t>{1}));
  // Moduli 2 and 3 mix into every residue.
  EXPECT_EQ(phi_image(PeriodicSet({2, 3}, {{0, 0}})), PeriodicSet::full(1));
  EXPECT_TRUE(phi_image(PeriodicSet::empty(2)).empty());
  EXPECT_THROW(phi_image(PeriodicSet::full(0)), InvalidArgument);
  std::mt19937 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    auto s = random_set(rng, 2, 6);
    auto img = phi_image(s);
    std::vector<PeriodicSet> one = {s};
    auto l = common_period(one);
    std::set<std::int64_t> sums;
    // Sums of members in a window cover every class mod the period.
    for_box(2, 2 * l, [&](const std::vector<std::int64_t>& n) {
      if (s.contains(n)) sums.insert(((n[0] + n[1]) % l + l) % l);
    });
    for (std::int64_t m = 0; m < l; ++m)
      EXPECT_EQ(img.contains(std::vector<std::int64_t>{m}), sums.count(m) > 0) << m;
  }
}

TEST(ReturnSet, Rot6) {
  auto sys = load("rot6.fsys");
  std::vector<PointId> u = {0};
  auto r = return_set(sys, 0, u);
  EXPECT_EQ(r.moduli(), (std::vector<std::uint64_t>{6, 3}));
  EXPECT_EQ(r.residue_count(), 3U);
}

TEST(ReturnSet, MatchesOracle) {
  for (const auto& name : testing_support::minimal_fixtures()) {
    auto sys = load(name);
    std::vector<PointId> u;
    for (PointId y = 0; y < sys.size(); y += 3) u.push_back(y);
    std::set<std::uint32_t> uset(u.begin(), u.end());
    for (PointId x = 0; x < sys.size(); x += 2) {
      auto r = return_set(sys, x, u);
      auto expected = oracle::return_residues(perms(sys), x, uset);
      std::vector<std::size_t> bounds(sys.orders().begin(), sys.orders().end());
      oracle::for_each_exponent(bounds, [&](const std::vector<std::size_t>& n) {
        std::vector<std::int64_t> ni(n.begin(), n.end());
        EXPECT_EQ(r.contains(ni), expected.count(n) > 0) << name;
      });
    }
  }
}

TEST(Containment, HoldsOnClosingFixtures) {
  for (const auto& name : testing_support::minimal_fixtures()) {
    auto sys = load(name);
    if (sys.dim() < 2) continue;
    for (PointId x = 0; x < sys.size(); x += 5) {
      std::vector<PointId> u = {x};
      if (sys.size() > 1) u.push_back((x + 1) % static_cast<PointId>(sys.size()));
      std::sort(u.begin(), u.end());
      auto v = joining_containment_check(sys, x, u);
      EXPECT_TRUE(v.hypotheses_met) << name;
      EXPECT_TRUE(v.contained) << name << " x=" << x;
      EXPECT_FALSE(v.joining.empty());
      EXPECT_TRUE(contains_zero_vector(v.joining));
      EXPECT_EQ(v.returns, return_set(sys, x, u));
    }
  }
}

TEST(Containment, HypothesesChecked) {
  std::vector<PointId> u = {0};
  EXPECT_FALSE(joining_containment_check(load("two_rot3.fsys"), 0, u).hypotheses_met);
  EXPECT_FALSE(joining_containment_check(load("rot5_d1.fsys"), 0, u).hypotheses_met);
  std::vector<PointId> away = {1};
  EXPECT_THROW(joining_containment_check(load("rot6.fsys"), 0, away), InvalidArgument);
}

TEST(Realization, TwoRotations) {
  // Factor j ignores T_j.
  RealizationFactor f1{FiniteZdSystem::rotation(3, {0, 1}), 0, {0}};
  RealizationFactor f2{FiniteZdSystem::rotation(4, {1, 0}), 0, {0, 1}};
  auto r = product_system_realization({f1, f2});
  EXPECT_TRUE(r.equal);
  EXPECT_TRUE(r.ucpp);
  EXPECT_EQ(r.returns, r.joining);
  EXPECT_EQ(r.system.size(), 12U);
  EXPECT_TRUE(is_minimal(r.system).minimal);
  // n_1 in {0,1} mod 4 from the second factor, n_2 = 0 mod 3 from the first.
  EXPECT_EQ(r.joining, PeriodicSet({4, 3}, {{0, 0}, {1, 0}}));
}

TEST(Realization, RejectsNonTrivialDirection) {
  RealizationFactor f1{FiniteZdSystem::rotation(3, {1, 1}), 0, {0}};
  RealizationFactor f2{FiniteZdSystem::rotation(4, {1, 0}), 0, {0}};
  EXPECT_THROW(product_system_realization({f1, f2}), InvalidArgument);
}

TEST(PeriodicSetText, RoundTrip) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_set(rng, 1 + trial % 3, 5);
    EXPECT_EQ(parse_periodic_set(format_periodic_set(s)), s);
  }
  EXPECT_EQ(parse_periodic_set(format_periodic_set(PeriodicSet::full(0))), PeriodicSet::full(0));
  EXPECT_THROW(parse_periodic_set("periodic-set k=1 moduli=2\n0,1\n"), ParseError);
}

TEST(ReturnTimesBattery, NoFailures) {
  for (const auto& name : testing_support::minimal_fixtures()) {
    auto sys = load(name);
    for (const auto& c : return_times_battery(sys, 0))
      EXPECT_NE(c.status, CheckStatus::Fail) << name << ": " << c.name << " " << c.detail;
  }
}
