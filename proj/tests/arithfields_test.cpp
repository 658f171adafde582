#include <gtest/gtest.h>

#include <memory>
#include <random>

#include "rankone/arithfields.hpp"

using namespace rankone;
using namespace rankone::arith;

namespace {

std::vector<std::vector<std::uint32_t>> cyclic_table(std::uint32_t n) {
  std::vector<std::vector<std::uint32_t>> t(n, std::vector<std::uint32_t>(n));
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b)
      t[a][b] = (a + b) % n;
  return t;
}

// Number of subgroups, a known invariant of each group.
std::size_t subgroup_count(const FiniteGroup &G) { return all_subgroups(G).size(); }

} // namespace

TEST(FiniteGroup, OrdersAndClasses) {
  auto S4 = symmetric_group(4);
  EXPECT_EQ(S4.order(), 24u);
  EXPECT_EQ(S4.classes().size(), 5u);
  EXPECT_EQ(S4.exponent(), 12u);
  auto S5 = symmetric_group(5);
  EXPECT_EQ(S5.order(), 120u);
  EXPECT_EQ(S5.classes().size(), 7u);
  auto G = gl32();
  EXPECT_EQ(G.order(), 168u);
  EXPECT_EQ(G.classes().size(), 6u);
  EXPECT_EQ(G.exponent(), 84u);
  std::size_t total = 0;
  for (std::size_t c = 0; c < G.classes().size(); ++c)
    total += G.class_size(c);
  EXPECT_EQ(total, 168u);
}

TEST(FiniteGroup, GroupAxiomsOnRandomTriples) {
  auto G = gl32();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint32_t> pick(0, 167);
  for (int i = 0; i < 2000; ++i) {
    auto a = pick(rng), b = pick(rng), c = pick(rng);
    EXPECT_EQ(G.mul(G.mul(a, b), c), G.mul(a, G.mul(b, c)));
    EXPECT_EQ(G.mul(a, G.inverse(a)), G.identity());
    EXPECT_EQ(G.class_of(G.conjugate(b, a)), G.class_of(a));
    EXPECT_EQ(G.power(a, G.element_order(a)), G.identity());
  }
}

TEST(FiniteGroup, SubgroupCountsMatchKnownValues) {
  EXPECT_EQ(subgroup_count(symmetric_group(3)), 6u);
  EXPECT_EQ(subgroup_count(symmetric_group(4)), 30u);
  EXPECT_EQ(subgroup_count(symmetric_group(5)), 156u);
  EXPECT_EQ(subgroup_count(gl32()), 179u);
}

TEST(FiniteGroup, FromTableMatchesGenerators) {
  auto C6 = FiniteGroup::from_table(cyclic_table(6));
  EXPECT_EQ(C6.order(), 6u);
  EXPECT_EQ(C6.classes().size(), 6u);
  EXPECT_EQ(C6.exponent(), 6u);
  EXPECT_EQ(subgroup_count(C6), 4u);
  auto G = FiniteGroup::from_generators({perm_from_cycles(6, {{0, 1, 2, 3, 4, 5}})});
  EXPECT_EQ(G.order(), 6u);
  EXPECT_EQ(subgroup_count(G), 4u);
}

TEST(FiniteGroup, FromTableIdentityNotFirst) {
  // Z/3 with labels shifted so that the identity is row 2.
  std::vector<std::vector<std::uint32_t>> t(3, std::vector<std::uint32_t>(3));
  for (std::uint32_t a = 0; a < 3; ++a)
    for (std::uint32_t b = 0; b < 3; ++b)
      t[a][b] = ((a + 1) + (b + 1)) % 3 == 0 ? 2 : ((a + 1) + (b + 1)) % 3 - 1;
  auto G = FiniteGroup::from_table(t);
  EXPECT_EQ(G.label(G.identity()), 2u);
  EXPECT_EQ(G.from_label(2), G.identity());
}

TEST(FiniteGroup, MalformedInputsRejected) {
  EXPECT_THROW(FiniteGroup::from_table({}), DomainError);
  EXPECT_THROW(FiniteGroup::from_table({{0, 1}, {0, 1}}), DomainError);
  EXPECT_THROW(FiniteGroup::from_table({{0, 1}, {1}}), DomainError);
  // A Latin square with identity 0 that is not associative (order 5 loop).
  std::vector<std::vector<std::uint32_t>> loop{{0, 1, 2, 3, 4},
                                               {1, 0, 3, 4, 2},
                                               {2, 4, 0, 1, 3},
                                               {3, 2, 4, 0, 1},
                                               {4, 3, 1, 2, 0}};
  EXPECT_THROW(FiniteGroup::from_table(loop), DomainError);
  EXPECT_THROW(FiniteGroup::from_generators({{0, 0, 1}}), DomainError);
  EXPECT_THROW(FiniteGroup::from_generators({}), DomainError);
  EXPECT_THROW(symmetric_group(8), ResourceError);
  auto G = symmetric_group(4);
  auto shared = std::make_shared<const FiniteGroup>(G);
  ElementSet bad = G.subset({G.identity(), G.index_of(perm_from_cycles(4, {{0, 1, 2}}))});
  EXPECT_FALSE(G.is_subgroup(bad));
  EXPECT_THROW(make_triple("bad", shared, bad, bad), DomainError);
}

TEST(Characters, FixedPointsAreClassFunctions) {
  auto G = std::make_shared<const FiniteGroup>(gl32());
  auto [point, line] = gl32_point_line(*G);
  auto t = make_triple("GL(3,2) point/line", G, point, line);
  ClassTriple ct = class_triple(t, true);
  EXPECT_EQ(ct.index1, 7u);
  EXPECT_EQ(ct.index2, 7u);
  EXPECT_EQ(ct.chi1, ct.chi2);
  // Burnside: the average number of fixed points of a transitive action is 1.
  std::int64_t sum = 0;
  for (std::size_t c = 0; c < ct.class_count(); ++c)
    sum += static_cast<std::int64_t>(ct.class_sizes[c]) * ct.chi1[c];
  EXPECT_EQ(sum, 168);
}

TEST(SBad, IdenticalSubgroupsGiveEmptySets) {
  auto G = std::make_shared<const FiniteGroup>(symmetric_group(4));
  auto H = G->generated({G->index_of(perm_from_cycles(4, {{0, 1, 2}}))});
  auto t = make_triple("S4 C3,C3", G, H, H);
  for (std::uint64_t d = 1; d <= 12; ++d)
    EXPECT_TRUE(s_bad(t, d).empty());
}

TEST(SBad, GassmannPairGivesEmptySets) {
  auto G = std::make_shared<const FiniteGroup>(gl32());
  auto [point, line] = gl32_point_line(*G);
  EXPECT_EQ(point.size(), 24u);
  EXPECT_EQ(line.size(), 24u);
  EXPECT_FALSE(conjugate_subgroups(*G, point, line));
  auto t = make_triple("GL(3,2) point/line", G, point, line);
  ClassTriple ct = class_triple(t);
  EXPECT_TRUE(gassmann_check(ct));
  EXPECT_TRUE(lmnr_check(ct));
  for (std::uint64_t d = 1; d <= 84; ++d) {
    EXPECT_TRUE(s_bad_classes(ct, d).empty()) << d;
    EXPECT_TRUE(s_bad(t, d).empty()) << d;
  }
  EXPECT_TRUE(degree_one_reduction(t));
}

TEST(SBad, DifferentIndicesContainIdentity) {
  auto G = std::make_shared<const FiniteGroup>(symmetric_group(4));
  auto A4 = G->generated({G->index_of(perm_from_cycles(4, {{0, 1, 2}})),
                          G->index_of(perm_from_cycles(4, {{1, 2, 3}}))});
  EXPECT_EQ(A4.size(), 12u);
  auto t = make_triple("S4 A4,S4", G, A4, G->generated(G->generators()));
  auto S = s_bad(t, 1);
  EXPECT_NE(std::find(S.begin(), S.end(), G->identity()), S.end());
  // chi_A4 - chi_S4 at a transposition is 0 - 1, at the identity 2 - 1.
  EXPECT_EQ(S.size(), 24u);
}

TEST(SBad, HandComputedS3) {
  // B1 = <(0 1)>, B2 = <(0 1 2)> in S3. chi_B1 = (3, 1, 0), chi_B2 = (2, 0, 2)
  // on (identity, transposition, 3-cycle).
  auto G = std::make_shared<const FiniteGroup>(symmetric_group(3));
  auto B1 = G->generated({G->index_of(perm_from_cycles(3, {{0, 1}}))});
  auto B2 = G->generated({G->index_of(perm_from_cycles(3, {{0, 1, 2}}))});
  auto t = make_triple("S3", G, B1, B2);
  EXPECT_EQ(s_bad(t, 1).size(), 6u);
  // d = 2: chi(a^2) - chi(a): identity 0 vs 0, transposition 2 vs 2,
  // 3-cycle 0 vs 0; all agree.
  EXPECT_TRUE(s_bad(t, 2).empty());
  // d = 3: chi(a^3) - chi(a): identity 0/0, transposition 0/0, 3-cycle 3/0.
  auto S3 = s_bad(t, 3);
  EXPECT_EQ(S3.size(), 2u);
  for (auto a : S3)
    EXPECT_EQ(G->element_order(a), 3u);
  EXPECT_THROW(s_bad(t, 0), DomainError);
}

TEST(Density, EmptyAndNonempty) {
  auto G = std::make_shared<const FiniteGroup>(symmetric_group(3));
  auto B1 = G->generated({G->index_of(perm_from_cycles(3, {{0, 1}}))});
  auto B2 = G->generated({G->index_of(perm_from_cycles(3, {{0, 1, 2}}))});
  auto t = make_triple("S3", G, B1, B2);
  auto r2 = density_check(t, 2);
  EXPECT_EQ(r2.verdict, DensityVerdict::empty);
  EXPECT_EQ(r2.density, 0);
  auto r3 = density_check(t, 3);
  EXPECT_EQ(r3.verdict, DensityVerdict::nonempty);
  EXPECT_EQ(r3.density, Rational(1, 3));
  EXPECT_EQ(r3.class_bound, Rational(1, 3));
  EXPECT_GE(r3.density, r3.threshold);
}

TEST(Density, CorruptedClassDataTriggersLogicError) {
  ClassTriple t;
  t.order = 10;
  t.exponent = 1;
  t.class_sizes = {0};
  t.power_map = {{0}};
  t.chi1 = {1};
  t.chi2 = {2};
  t.meets1 = {1};
  t.meets2 = {1};
  EXPECT_THROW(density_check(t, 1), LogicError);
  EXPECT_THROW(degree_one_reduction(t), LogicError);
}

TEST(Reduction, ExhaustiveScanS4) {
  auto s = scan_subgroup_pairs("S4", symmetric_group(4));
  EXPECT_EQ(s.subgroups, 30u);
  EXPECT_EQ(s.pairs, 30u * 31u / 2u);
  EXPECT_EQ(s.logic_errors, 0u);
  EXPECT_TRUE(s.ok());
  // S4 has no Gassmann pair of distinct subgroups that are not conjugate,
  // but conjugate pairs are Gassmann.
  EXPECT_GT(s.gassmann_pairs, 0u);
  EXPECT_GE(s.lmnr_pairs, s.gassmann_pairs);
}

TEST(Reduction, GassmannPairsInS4AreConjugate) {
  auto A = symmetric_group(4);
  auto subs = all_subgroups(A);
  auto shared = std::make_shared<const FiniteGroup>(A);
  for (std::size_t i = 0; i < subs.size(); ++i)
    for (std::size_t j = i + 1; j < subs.size(); ++j) {
      auto ct = class_triple(make_triple("S4", shared, subs[i], subs[j]), false);
      if (gassmann_check(ct))
        EXPECT_TRUE(conjugate_subgroups(A, subs[i], subs[j]));
    }
}

TEST(Reduction, ExhaustiveScanGl32) {
  auto s = scan_subgroup_pairs("GL(3,2)", gl32());
  EXPECT_EQ(s.subgroups, 179u);
  EXPECT_EQ(s.logic_errors, 0u);
  EXPECT_TRUE(s.ok());
  EXPECT_EQ(s.closure_checks, s.pairs * 84u);
}

TEST(Reduction, BuiltinPsl2Triple) {
  ClassTriple t = builtin_psl2_triple(3);
  EXPECT_EQ(t.order, 262440u);
  EXPECT_EQ(t.index1, 9720u);
  EXPECT_EQ(t.index2, 29160u);
  EXPECT_FALSE(gassmann_check(t));
  EXPECT_TRUE(lmnr_check(t));
  auto r = triple_report(t);
  EXPECT_TRUE(r.degree_one_reduction);
  EXPECT_EQ(r.densities.size(), t.exponent);
  // Different indices: the identity alone separates at d = 1.
  EXPECT_EQ(r.densities.front().verdict, DensityVerdict::nonempty);
  std::uint64_t total = 0;
  for (auto s : t.class_sizes)
    total += s;
  EXPECT_EQ(total, t.order);
}
