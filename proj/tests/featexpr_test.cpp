#include <gtest/gtest.h>

#include <set>

#include "liftdl/common/error.hpp"
#include "liftdl/featexpr/feature_model.hpp"
#include "liftdl/featexpr/pc_store.hpp"
#include "support/truth_table.hpp"

namespace liftdl::featexpr {
namespace {

using testing::TruthTable;

class FeatExprTest : public ::testing::Test {
 protected:
  FeatExprTest() {
    store.features().intern("FA");
    store.features().intern("FB");
    store.features().intern("FC");
  }
  PresenceCondition pc(std::string_view text) { return store.parse(text); }
  FeatureExpr expr(std::string_view text) { return parse_feature_expr(text, store.features()); }

  PcStore store;
};

TEST_F(FeatExprTest, ParsesGrammarExamples) {
  const FeatureId fa = 0, fb = 1, fc = 2;
  EXPECT_EQ(expr("FA & !FB"), FeatureExpr::conj(FeatureExpr::var(fa), FeatureExpr::negate(FeatureExpr::var(fb))));
  EXPECT_EQ(expr("true"), FeatureExpr::constant(true));
  EXPECT_EQ(expr("FA & (FB | !FC)"),
            FeatureExpr::conj(FeatureExpr::var(fa),
                              FeatureExpr::disj(FeatureExpr::var(fb), FeatureExpr::negate(FeatureExpr::var(fc)))));
  EXPECT_EQ(expr("  FA&&FB ||FC "), expr("(FA & FB) | FC"));
  EXPECT_EQ(expr("!!FA"), FeatureExpr::negate(FeatureExpr::negate(FeatureExpr::var(fa))));
}

TEST_F(FeatExprTest, SyntaxErrorsCarryByteOffsets) {
  try {
    expr("FA &");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  try {
    expr("FA ) FB");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 3u);
  }
  try {
    expr("(FA | FB");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 8u);
  }
  EXPECT_THROW(expr("FA $ FB"), SyntaxError);
  EXPECT_THROW(expr(""), SyntaxError);
}

TEST_F(FeatExprTest, OpenRegistryAutoRegistersClosedRejects) {
  expr("FD");
  EXPECT_EQ(store.features().size(), 4u);
  EXPECT_EQ(store.features().at(3).origin, FeatureOrigin::DeclaredBoolean);
  store.features().close();
  try {
    expr("FA & Nope");
    FAIL();
  } catch (const UnknownFeatureError& e) {
    EXPECT_EQ(e.name(), "Nope");
    EXPECT_EQ(e.offset(), 5u);
  }
}

TEST_F(FeatExprTest, ToPcCanonicalForms) {
  EXPECT_TRUE(pc("FA & !FA").is_false());
  EXPECT_EQ(pc("FA & FB"), pc("FB & FA"));
  EXPECT_TRUE(pc("FA | true").is_true());
  EXPECT_EQ(pc("!(FA | FB)"), pc("!FA & !FB"));
}

TEST_F(FeatExprTest, BooleanOperations) {
  const auto fa = pc("FA");
  EXPECT_EQ(store.pc_and(fa, PresenceCondition::True()), fa);
  EXPECT_EQ(store.pc_not(store.pc_not(fa)), fa);
  // Truth table over {FA, FB}: rows FA∧¬FB and FA∧FB cover exactly the FA rows.
  const auto tt_lhs = TruthTable::of(expr("FA & !FB | FA & FB"), 2);
  ASSERT_EQ(tt_lhs, TruthTable::of(expr("FA"), 2));
  EXPECT_EQ(store.pc_or(pc("FA & !FB"), pc("FA & FB")), fa);
  EXPECT_EQ(store.pc_and_not(pc("FA"), pc("FB")), pc("FA & !FB"));
}

TEST_F(FeatExprTest, SatisfiabilityAndImplication) {
  EXPECT_FALSE(PcStore::is_sat(pc("FA & !FA")));
  EXPECT_TRUE(PcStore::is_sat(pc("FA & !FB")));
  EXPECT_TRUE(store.implies(pc("FA & !FB & FC"), pc("FA & !FB")));
  EXPECT_FALSE(store.implies(pc("FA"), pc("FA & FB")));
  EXPECT_TRUE(store.implies(PresenceCondition::False(), pc("FA")));
  EXPECT_FALSE(store.implies(PresenceCondition::True(), pc("FA | FB")));
}

TEST_F(FeatExprTest, EvaluateFollowsProjection) {
  const auto rho = Configuration::of(store.features(), {"FA"});
  EXPECT_FALSE(evaluate(expr("FA & FB"), rho));
  EXPECT_TRUE(evaluate(expr("FA & !FB"), rho));
  EXPECT_TRUE(evaluate(expr("true"), rho));
  EXPECT_FALSE(store.evaluate(pc("FA & FB"), rho));
  EXPECT_TRUE(store.evaluate(pc("FA & !FB"), rho));
}

TEST_F(FeatExprTest, EvaluateRejectsShortConfiguration) {
  EXPECT_THROW(store.evaluate(pc("FC"), Configuration(2)), Error);
}

TEST_F(FeatExprTest, AbstractComparisonNaming) {
  auto& reg = store.features();
  const auto lt = abstract_comparison("x", CompareOp::Lt, "Feat2", reg);
  EXPECT_EQ(reg.name(lt), "x_LT_Feat2");
  EXPECT_EQ(reg.at(lt).origin, FeatureOrigin::AbstractedComparison);
  EXPECT_EQ(reg.name(abstract_comparison("x", CompareOp::Eq, "Feat3", reg)), "x_EQ_Feat3");
  EXPECT_EQ(reg.name(abstract_comparison("mode", CompareOp::Ge, "Feat1", reg)), "mode_GE_Feat1");
  const auto size = reg.size();
  EXPECT_EQ(abstract_comparison("x", CompareOp::Lt, "Feat2", reg), lt);
  EXPECT_EQ(reg.size(), size);
  EXPECT_EQ(mirror(CompareOp::Le), CompareOp::Ge);
  EXPECT_EQ(mirror(CompareOp::Ne), CompareOp::Ne);
}

TEST_F(FeatExprTest, EnumGroupConstraints) {
  auto& reg = store.features();
  std::vector<FeatureId> feats;
  for (auto name : {"Feat0", "Feat1", "Feat2", "Feat3"}) feats.push_back(reg.intern(name, FeatureOrigin::EnumLiteral));

  const auto optional = enum_group_constraints(feats, false);
  ASSERT_EQ(optional.size(), 6u);
  EXPECT_EQ(to_string(optional[0], reg), "!(Feat0 & Feat1)");
  EXPECT_EQ(to_string(optional[5], reg), "!(Feat2 & Feat3)");

  const auto mandatory = enum_group_constraints(feats, true);
  ASSERT_EQ(mandatory.size(), 7u);
  EXPECT_EQ(to_string(mandatory[6], reg), "Feat0 | Feat1 | Feat2 | Feat3");

  const std::vector<FeatureId> two{reg.intern("A"), reg.intern("B")};
  const auto exactly_one = enum_group_constraints(two, true);
  ASSERT_EQ(exactly_one.size(), 2u);
  EXPECT_EQ(to_string(exactly_one[0], reg), "!(A & B)");
  EXPECT_EQ(to_string(exactly_one[1], reg), "A | B");

  EXPECT_THROW(enum_group_constraints(std::span(two).first(1), true), Error);
}

TEST_F(FeatExprTest, CountUniquePcs) {
  const std::vector<PresenceCondition> a{pc("FA"), pc("FA & FB"), pc("FB & FA")};
  EXPECT_EQ(count_unique_pcs(a), 2u);
  const std::vector<PresenceCondition> b{PresenceCondition::True(), PresenceCondition::True()};
  EXPECT_EQ(count_unique_pcs(b), 0u);

  const std::vector<std::string> extracted{"FA", "FA & FB", "FA & !FB", "FA", "FA & !FB"};
  std::set<TruthTable> distinct;
  for (const auto& s : extracted) distinct.insert(TruthTable::of(expr(s), 2));
  ASSERT_EQ(distinct.size(), 3u);
  std::vector<PresenceCondition> pcs;
  for (const auto& s : extracted) pcs.push_back(pc(s));
  EXPECT_EQ(count_unique_pcs(pcs), 3u);
}

TEST_F(FeatExprTest, RenderingIsReadableAndReparses) {
  EXPECT_EQ(store.render(pc("!FB & FA")), "FA & !FB");
  EXPECT_EQ(store.render(PresenceCondition::True()), "true");
  EXPECT_EQ(store.render(PresenceCondition::False()), "false");
  EXPECT_EQ(store.render(pc("FA | FB")), "FA | FB");
  EXPECT_EQ(store.render(pc("FA & FB | FA & !FB | FC & FA")), "FA");
}

TEST_F(FeatExprTest, InterningIsIdempotent) {
  const auto p = pc("FA & (FB | !FC)");
  const auto nodes = store.node_count();
  EXPECT_EQ(pc("(FB | !FC) & FA"), p);
  EXPECT_EQ(pc("FA & (FB | !FC)"), p);
  EXPECT_EQ(store.node_count(), nodes);
}

TEST_F(FeatExprTest, SupportAndSatCount) {
  EXPECT_EQ(store.support(pc("FA & FC | FA & !FC")), std::vector<FeatureId>{0});
  EXPECT_DOUBLE_EQ(store.sat_count(pc("FA | FB"), 3), 6.0);
  EXPECT_DOUBLE_EQ(store.sat_count(PresenceCondition::True(), 3), 8.0);
}

TEST(FeatureModelTest, ParsesFileSyntax) {
  PcStore store;
  const auto fm = FeatureModel::parse("# exclusions\n!(Feat0 & Feat1)\n\n  Feat0 | Feat1  # one of\n", store);
  ASSERT_EQ(fm.constraints().size(), 2u);
  EXPECT_EQ(fm.compiled(), store.parse("Feat0 & !Feat1 | Feat1 & !Feat0"));
}

TEST(FeatureModelTest, RejectsUnsatisfiableModel) {
  PcStore store;
  EXPECT_THROW(FeatureModel::parse("FA\n!FA\n", store), Error);
}

TEST(FeatureModelTest, ReportsLineAndColumn) {
  PcStore store;
  try {
    FeatureModel::parse("FA\nFB & | FC\n", store, "fm.txt");
    FAIL();
  } catch (const SourceError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 6u);
    EXPECT_EQ(e.file(), "fm.txt");
  }
}

TEST(FeatureModelTest, EmptyModelIsTrue) {
  PcStore store;
  EXPECT_TRUE(FeatureModel::parse("# nothing\n\n", store).compiled().is_true());
  EXPECT_TRUE(FeatureModel().compiled().is_true());
}

// Property tests over random formulas, checked against exhaustive truth tables.

class RandomFormulas : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomFormulas, CanonicityMatchesTruthTables) {
  std::mt19937_64 rng(GetParam());
  PcStore store;
  const std::size_t n = 1 + GetParam() % 12;
  for (std::size_t i = 0; i < n; ++i) store.features().intern("F" + std::to_string(i));
  for (int trial = 0; trial < 200; ++trial) {
    const auto e1 = testing::random_expr(rng, n, 4);
    // Bias towards equivalent pairs: perturb e1 by a tautological rewrite half the time.
    const auto e2 = trial % 2 ? FeatureExpr::negate(FeatureExpr::negate(e1)) : testing::random_expr(rng, n, 4);
    const auto e3 = trial % 3 == 0 ? FeatureExpr::disj(e1, FeatureExpr::conj(e1, e2)) : e2;
    const bool equal_tables = TruthTable::of(e1, n) == TruthTable::of(e3, n);
    EXPECT_EQ(store.to_pc(e1) == store.to_pc(e3), equal_tables);
  }
}

TEST_P(RandomFormulas, EvaluateAgreesWithRestriction) {
  std::mt19937_64 rng(GetParam() * 7919);
  PcStore store;
  const std::size_t n = 1 + GetParam() % 8;
  for (std::size_t i = 0; i < n; ++i) store.features().intern("F" + std::to_string(i));
  for (int trial = 0; trial < 20; ++trial) {
    const auto e = testing::random_expr(rng, n, 4);
    const auto p = store.to_pc(e);
    const auto table = TruthTable::of(e, n);
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); ++c) {
      const auto rho = Configuration::from_bits(n, c);
      ASSERT_EQ(evaluate(e, rho), table.at(c));
      ASSERT_EQ(store.evaluate(p, rho), table.at(c));
    }
  }
}

TEST_P(RandomFormulas, ImpliesMatchesEnumeration) {
  std::mt19937_64 rng(GetParam() * 104729);
  PcStore store;
  const std::size_t n = 1 + GetParam() % 10;
  for (std::size_t i = 0; i < n; ++i) store.features().intern("F" + std::to_string(i));
  for (int trial = 0; trial < 60; ++trial) {
    const auto a = testing::random_expr(rng, n, 3);
    const auto b = trial % 2 ? FeatureExpr::disj(a, testing::random_expr(rng, n, 2)) : testing::random_expr(rng, n, 3);
    EXPECT_EQ(store.implies(store.to_pc(a), store.to_pc(b)),
              TruthTable::of(a, n).implies(TruthTable::of(b, n)));
  }
}

TEST_P(RandomFormulas, RenderReparsesToSameHandle) {
  std::mt19937_64 rng(GetParam() * 31337);
  PcStore store;
  const std::size_t n = 1 + GetParam() % 10;
  for (std::size_t i = 0; i < n; ++i) store.features().intern("F" + std::to_string(i));
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = store.to_pc(testing::random_expr(rng, n, 4));
    const auto nodes = store.node_count();
    const std::string text = store.render(p);
    EXPECT_EQ(store.node_count(), nodes) << "rendering must not allocate";
    EXPECT_EQ(store.parse(text), p) << text;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomFormulas, ::testing::Range<std::uint64_t>(1, 25));

}  // namespace
}  // namespace liftdl::featexpr
