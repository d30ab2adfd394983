#include <gtest/gtest.h>

#include <set>

#include "liftdl/analysis/analysis.hpp"
#include "liftdl/common/error.hpp"
#include "liftdl/engine/engine.hpp"
#include "support/naive_datalog.hpp"
#include "support/random_instance.hpp"

using namespace liftdl;
using namespace liftdl::engine;
using datalog::SymbolTable;
namespace oracle = liftdl::testing;
using featexpr::FeatureModel;
using oracle::Facts;
using oracle::Tuple;

namespace {

using Rows = std::vector<std::vector<std::string>>;

const Program& bundle() {
  static const Program p = analysis::behaviour_alteration_program().program;
  return p;
}

Database empty_bundle_db(PcStore* store) {
  Database db(std::make_shared<SymbolTable>(), store);
  for (const auto& name : bundle().inputs()) db.relation(name, bundle().at(name).arity());
  return db;
}

/// The two-component example as facts: updateX in C1 writes GlobVar under
/// FA & !FB, x flows from GlobVar under FA, GlobVar guards the call to foo.
Database two_components(PcStore& store) {
  Database db = empty_bundle_db(&store);
  const auto FA = store.var("FA"), FB = store.var("FB");
  db.add("write", {"updateX", "GlobVar"}, store.pc_and(FA, store.pc_not(FB)), &store);
  db.add("write", {"updateX", "x"}, FA, &store);
  db.add("varWrite", {"GlobVar", "x"}, FA, &store);
  db.add("varWrite", {"x", "x"}, store.pc_and(FA, FB), &store);
  db.add("varWrite", {"GlobVar", "GlobVar"}, store.pc_and(FA, store.pc_not(FB)), &store);
  db.add("varInfFunc", {"GlobVar", "foo"}, PresenceCondition::True(), &store);
  db.add("cFunction", {"updateX", "C1"}, PresenceCondition::True(), &store);
  db.add("cFunction", {"foo", "C2"}, PresenceCondition::True(), &store);
  db.add("cFunction", {"bar", "C2"}, PresenceCondition::True(), &store);
  return db;
}

Facts as_facts(const Database& db) {
  Facts out;
  for (const auto& [name, rel] : db.relations()) {
    auto& set = out[name];
    for (const auto& t : db.tuples(name)) set.insert(t);
  }
  return out;
}

}  // namespace

TEST(Lifted, TransitiveFlowConjoinsPcs) {
  PcStore store;
  Database db = empty_bundle_db(&store);
  db.add("varWrite", {"a", "b"}, store.var("FA"), &store);
  db.add("varWrite", {"b", "c"}, store.var("FB"), &store);
  const auto r = evaluate_lifted(bundle(), db, store);
  EXPECT_EQ(r.db.tuples("transVarWrite"), (Rows{{"a", "b"}, {"a", "c"}, {"b", "c"}}));
  const PresenceCondition pc = *r.db.pc_of("transVarWrite", {"a", "c"});
  // Present in exactly the one configuration of four with both features.
  int present = 0;
  for (std::uint64_t bits = 0; bits < 4; ++bits) present += store.evaluate(pc, Configuration::from_bits(2, bits));
  EXPECT_EQ(present, 1);
  EXPECT_TRUE(store.evaluate(pc, Configuration::from_bits(2, 3)));
}

TEST(Lifted, TwoComponentsBehaviourAlteration) {
  PcStore store;
  const Database db = two_components(store);
  const auto r = evaluate_lifted(bundle(), db, store);
  EXPECT_EQ(r.db.tuples("behAlter"), (Rows{{"updateX", "foo"}}));
  EXPECT_EQ(store.render(*r.db.pc_of("behAlter", {"updateX", "foo"})), "FA & !FB");
  const auto report = verify_lifting(bundle(), db, store);
  EXPECT_TRUE(report.passed);
  EXPECT_EQ(report.configurations, 4u);

  const Database ground = ground_eval(bundle(), db);
  EXPECT_EQ(ground.tuples("behAlter"), (Rows{{"updateX", "foo"}}));
  EXPECT_EQ(ground.store(), nullptr);
}

TEST(Lifted, SecondDerivationOnlyAddsTheUncoveredPart) {
  PcStore store;
  const Program p = datalog::parse_program(R"(.decl a(x: symbol)
.decl b(x: symbol)
.decl r(x: symbol)
.decl s(x: symbol)
.input a, b
r(x) :- a(x).
r(x) :- b(x).
s(x) :- r(x).
)");
  Database db(std::make_shared<SymbolTable>(), &store);
  const auto FA = store.var("FA"), FB = store.var("FB");
  db.add("a", {"t"}, store.pc_and(FA, FB), &store);
  db.add("b", {"t"}, store.pc_and(FA, store.pc_not(FB)), &store);
  std::vector<PresenceCondition> seen;
  EvalOptions opts;
  opts.observer = [&](const Database& d, std::size_t, std::size_t) {
    if (auto pc = d.pc_of("r", {"t"})) seen.push_back(*pc);
  };
  const auto r = evaluate_lifted(p, db, store, opts);
  EXPECT_EQ(*r.db.pc_of("r", {"t"}), FA);
  EXPECT_EQ(*r.db.pc_of("s", {"t"}), FA);
  ASSERT_FALSE(seen.empty());
  EXPECT_EQ(seen.back(), FA);

  // Merging the two derivations one after the other: the stored PC grows to
  // FA and the delta carries only FA & !FB.
  datalog::Relation rel(1);
  const datalog::Symbol t[] = {0};
  rel.merge(t, store.pc_and(FA, FB), &store);
  const PresenceCondition e = rel.pc(0), d = store.pc_and(FA, store.pc_not(FB));
  EXPECT_EQ(store.pc_or(e, d), FA);
  EXPECT_EQ(store.pc_and_not(d, e), d);
  EXPECT_TRUE(store.pc_and_not(e, FA).is_false());
}

TEST(Ground, EmptyDatabaseGivesEmptyOutputs) {
  const Database out = ground_eval(bundle(), empty_bundle_db(nullptr));
  for (const auto& name : bundle().derived()) EXPECT_TRUE(out.tuples(name).empty()) << name;
  PcStore store;
  const auto lifted = evaluate_lifted(bundle(), empty_bundle_db(&store), store);
  EXPECT_EQ(lifted.stats.output_facts, 0u);
}

TEST(Ground, TenNodeCycleClosure) {
  Database db = empty_bundle_db(nullptr);
  for (int i = 0; i < 10; ++i) db.add("varWrite", {"v" + std::to_string(i), "v" + std::to_string((i + 1) % 10)});
  RunStats stats;
  const Database out = ground_eval(bundle(), db, &stats);
  const auto pairs = out.tuples("transVarWrite");
  // Reachability by repeated squaring of the adjacency relation.
  std::set<std::pair<int, int>> reach;
  for (int i = 0; i < 10; ++i) reach.insert({i, (i + 1) % 10});
  for (bool grew = true; grew;) {
    grew = false;
    for (auto [a, b] : std::set(reach))
      for (auto [c, d] : std::set(reach))
        if (b == c) grew |= reach.insert({a, d}).second;
  }
  EXPECT_EQ(reach.size(), 100u);
  EXPECT_EQ(pairs.size(), reach.size());
  EXPECT_EQ(stats.output_facts, 100u);
  ASSERT_EQ(stats.strata.size(), 2u);
  EXPECT_GE(stats.strata[0].iterations, 2u);
}

TEST(Project, KeepsTuplesWhosePcHolds) {
  PcStore store;
  const Database db = two_components(store);
  const auto fa = *store.features().find("FA"), fb = *store.features().find("FB");
  Configuration only_a(2), both(2), none(2);
  only_a.set(fa, true);
  both.set(fa, true);
  both.set(fb, true);
  EXPECT_EQ(project(db, store, only_a).pc_of("write", {"updateX", "GlobVar"}).has_value(), true);
  EXPECT_EQ(project(db, store, both).pc_of("write", {"updateX", "GlobVar"}).has_value(), false);

  const Database bare = project(db, store, none);
  EXPECT_TRUE(bare.tuples("write").empty());
  EXPECT_TRUE(bare.tuples("varWrite").empty());
  EXPECT_EQ(bare.tuples("cFunction").size(), 3u);
  EXPECT_EQ(bare.tuples("varInfFunc").size(), 1u);
  EXPECT_EQ(bare.store(), nullptr);

  for (const Configuration& rho : {only_a, both, none}) {
    const Database once = project(db, store, rho);
    const Database twice = project(once, store, rho);
    for (const auto& [name, rel] : once.relations()) EXPECT_EQ(once.tuples(name), twice.tuples(name));
  }
}

TEST(FeatureModelFilter, MutualExclusion) {
  PcStore store;
  const auto fm = FeatureModel::parse("!(Feat0 & Feat1)\n", store);
  Database db(std::make_shared<SymbolTable>(), &store);
  db.add("r", {"both"}, store.parse("Feat0 & Feat1"), &store);
  db.add("r", {"one"}, store.parse("Feat0"), &store);
  EXPECT_EQ(apply_feature_model(db, store, fm), 1u);
  EXPECT_EQ(db.tuples("r"), (Rows{{"one"}}));
  EXPECT_EQ(*db.pc_of("r", {"one"}), store.var("Feat0"));
  EXPECT_EQ(apply_feature_model(db, store, FeatureModel()), 0u);
}

TEST(FeatureModelFilter, DuringAndAfterEvaluation) {
  PcStore store;
  const Program p = datalog::parse_program(R"(.decl a(x: symbol)
.decl b(x: symbol)
.decl r(x: symbol)
.input a, b
.output r
r(x) :- a(x), b(x).
)");
  Database db(std::make_shared<SymbolTable>(), &store);
  db.add("a", {"t"}, store.var("Feat0"), &store);
  db.add("b", {"t"}, store.var("Feat1"), &store);
  db.add("a", {"u"}, store.var("Feat0"), &store);
  db.add("b", {"u"}, PresenceCondition::True(), &store);
  const auto fm = FeatureModel::parse("!(Feat0 & Feat1)\n", store);

  EvalOptions post;
  post.feature_model = &fm;
  const auto after = evaluate_lifted(p, db, store, post);
  EXPECT_EQ(after.db.tuples("r"), (Rows{{"u"}}));
  EXPECT_EQ(after.stats.fm_removed, 1u);
  EXPECT_EQ(after.stats.output_facts, 1u);
  // Inputs are left alone by the post-pass.
  EXPECT_EQ(after.db.tuples("b").size(), 2u);

  EvalOptions during = post;
  during.prune_with_fm_during_eval = true;
  const auto pruned = evaluate_lifted(p, db, store, during);
  EXPECT_EQ(pruned.db.tuples("r"), (Rows{{"u"}}));
  EXPECT_EQ(pruned.stats.fm_removed, 0u);
}

TEST(Stats, ReportFields) {
  PcStore store;
  EvalOptions opts;
  opts.collect_stats = true;
  const auto r = evaluate_lifted(bundle(), two_components(store), store, opts);
  // transVarWrite: (GlobVar,x)@FA, (x,x)@FA&FB, (GlobVar,GlobVar)@FA&!FB;
  // behAlter: (updateX,foo)@FA&!FB.
  EXPECT_EQ(r.stats.output_facts, 4u);
  EXPECT_EQ(r.stats.output_facts_with_pc, 4u);
  EXPECT_DOUBLE_EQ(r.stats.output_facts_with_pc_percent, 100.0);
  EXPECT_EQ(r.stats.unique_pcs, 3u);
  EXPECT_EQ(r.stats.unsat_dropped, 0u);
  const std::string text = r.stats.to_text();
  for (const char* key : {"output_facts: 4\n", "output_facts_with_pc: 4\n", "output_facts_with_pc_percent: 100.00\n",
                          "unique_pcs: 3\n", "unsat_dropped: 0\n", "fm_removed: 0\n", "stratum.0: transVarWrite",
                          "stratum.1: behAlter iterations=1\n"})
    EXPECT_NE(text.find(key), std::string::npos) << key;
}

TEST(Stats, PlantedContradictionsAreCounted) {
  PcStore store;
  Database db = empty_bundle_db(&store);
  const auto F0 = store.var("F0"), F1 = store.var("F1");
  // Three writers whose flow reaches a guard only under the opposite
  // condition, plus one consistent pair.
  const std::pair<PresenceCondition, PresenceCondition> plants[] = {
      {F0, store.pc_not(F0)}, {F1, store.pc_not(F1)}, {store.pc_and(F0, F1), store.pc_not(F1)}, {F0, F1}};
  for (int i = 0; i < 4; ++i) {
    const std::string n = std::to_string(i);
    db.add("write", {"w" + n, "v" + n}, plants[i].first, &store);
    db.add("varWrite", {"v" + n, "u" + n}, PresenceCondition::True(), &store);
    db.add("varInfFunc", {"u" + n, "g" + n}, plants[i].second, &store);
    db.add("cFunction", {"w" + n, "A"}, PresenceCondition::True(), &store);
    db.add("cFunction", {"g" + n, "B"}, PresenceCondition::True(), &store);
  }
  EvalOptions opts;
  opts.collect_stats = true;
  const auto lifted = evaluate_lifted(bundle(), db, store, opts);
  RunStats ground;
  ground_eval(bundle(), db, &ground);
  EXPECT_EQ(lifted.stats.unsat_dropped, 3u);
  EXPECT_EQ(lifted.db.tuples("behAlter"), (Rows{{"w3", "g3"}}));
  EXPECT_EQ(lifted.stats.output_facts, ground.output_facts - lifted.stats.unsat_dropped);

  // Without stats the same tuples are absent; the count is simply not kept.
  const auto quick = evaluate_lifted(bundle(), db, store);
  EXPECT_EQ(quick.db.tuples("behAlter"), lifted.db.tuples("behAlter"));
  EXPECT_EQ(quick.stats.unsat_dropped, 0u);
}

TEST(Errors, MissingInputAndForeignStore) {
  PcStore store, other;
  Database partial(std::make_shared<SymbolTable>(), &store);
  partial.relation("write", 2);
  EXPECT_THROW(evaluate_lifted(bundle(), partial, store), Error);
  EXPECT_THROW(ground_eval(bundle(), partial), Error);
  EXPECT_THROW(evaluate_lifted(bundle(), two_components(store), other), Error);

  Database wrong = empty_bundle_db(&store);
  wrong.relation("behAlter", 3);
  EXPECT_THROW(evaluate_lifted(bundle(), wrong, store), Error);
}

TEST(VerifyLifting, AllTruePcsTriviallyPass) {
  PcStore store;
  store.features().intern("FA");
  Database db = empty_bundle_db(&store);
  db.add("write", {"f", "v"}, PresenceCondition::True(), &store);
  db.add("varWrite", {"v", "w"}, PresenceCondition::True(), &store);
  db.add("varInfFunc", {"w", "g"}, PresenceCondition::True(), &store);
  db.add("cFunction", {"f", "A"}, PresenceCondition::True(), &store);
  db.add("cFunction", {"g", "B"}, PresenceCondition::True(), &store);
  const auto report = verify_lifting(bundle(), db, store);
  EXPECT_TRUE(report.passed);
  EXPECT_EQ(report.configurations, 2u);
}

TEST(VerifyLifting, RefusesTooManyFeatures) {
  PcStore store;
  for (int i = 0; i < 13; ++i) store.features().intern("F" + std::to_string(i));
  EXPECT_THROW(verify_lifting(bundle(), empty_bundle_db(&store), store), Error);
}

// --- properties over random instances ----------------------------------------------

class RandomInstances : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomInstances, LiftedResultMatchesEveryProduct) {
  const auto inst = oracle::random_instance(GetParam());
  PcStore store;
  const Database db = inst.database(store);
  const auto lifted = evaluate_lifted(inst.program, db, store);

  const auto report = verify_lifting(inst.program, db, store);
  EXPECT_TRUE(report.passed) << inst.text;
  EXPECT_EQ(report.configurations, std::uint64_t{1} << inst.features);

  // Independent oracle: naive evaluation of each product's input facts.
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << inst.features); ++c) {
    const Facts expected = oracle::naive_eval(inst.program, inst.product(c));
    const Facts actual = as_facts(project(lifted.db, store, Configuration::from_bits(inst.features, c)));
    for (const auto& name : inst.program.derived()) {
      const auto it = actual.find(name);
      const std::set<Tuple> got = it == actual.end() ? std::set<Tuple>{} : it->second;
      const auto want = expected.count(name) ? expected.at(name) : std::set<Tuple>{};
      ASSERT_EQ(got, want) << name << " under configuration " << c << "\n" << inst.text;
    }
  }

  // Stored PCs are satisfiable.
  for (const auto& name : inst.program.derived())
    for (const auto& t : lifted.db.tuples(name)) EXPECT_FALSE(lifted.db.pc_of(name, t)->is_false());
}

TEST_P(RandomInstances, StrippedPcsGiveTheGroundResult) {
  const auto inst = oracle::random_instance(GetParam());
  PcStore store;
  const Database db = inst.database(store, /*strip_pcs=*/true);
  const auto lifted = evaluate_lifted(inst.program, db, store);
  const Database ground = ground_eval(inst.program, db);
  const Facts oracle = oracle::naive_eval(inst.program, inst.all_facts());
  for (const auto& name : inst.program.derived()) {
    EXPECT_EQ(lifted.db.tuples(name), ground.tuples(name)) << name;
    const auto want = oracle.count(name) ? oracle.at(name) : std::set<Tuple>{};
    const auto got = ground.tuples(name);
    EXPECT_EQ(std::set<Tuple>(got.begin(), got.end()), want) << name;
    for (const auto& t : lifted.db.tuples(name)) EXPECT_TRUE(lifted.db.pc_of(name, t)->is_true());
  }
}

TEST_P(RandomInstances, StoredPcsOnlyGrow) {
  const auto inst = oracle::random_instance(GetParam());
  PcStore store;
  const Database db = inst.database(store);
  std::map<std::pair<std::string, Tuple>, PresenceCondition> last;
  std::size_t rounds = 0;
  bool monotone = true;
  EvalOptions opts;
  opts.observer = [&](const Database& d, std::size_t, std::size_t) {
    ++rounds;
    for (const auto& name : inst.program.derived())
      for (const auto& t : d.tuples(name)) {
        const PresenceCondition now = *d.pc_of(name, t);
        auto [it, fresh] = last.try_emplace({name, t}, now);
        if (!fresh) {
          monotone &= store.implies(it->second, now);
          it->second = now;
        }
      }
  };
  const auto r = evaluate_lifted(inst.program, db, store, opts);
  EXPECT_TRUE(monotone);
  std::size_t iterations = 0;
  for (const auto& s : r.stats.strata) iterations += s.iterations;
  EXPECT_EQ(iterations, rounds);
  EXPECT_LE(iterations, std::max<std::size_t>(1, last.size()) * (std::size_t{1} << inst.features) + r.stats.strata.size());
}

TEST_P(RandomInstances, UnsatTuplesBelongToNoProduct) {
  const auto inst = oracle::random_instance(GetParam());
  PcStore store;
  const Database db = inst.database(store);
  EvalOptions opts;
  opts.collect_stats = true;
  const auto lifted = evaluate_lifted(inst.program, db, store, opts);
  const auto quick = evaluate_lifted(inst.program, db, store);
  RunStats ground_stats;
  const Database ground = ground_eval(inst.program, db, &ground_stats);

  std::size_t dropped = 0;
  for (const auto& name : inst.program.derived()) {
    EXPECT_EQ(lifted.db.tuples(name), quick.db.tuples(name));
    for (const auto& t : lifted.db.tuples(name)) EXPECT_EQ(*lifted.db.pc_of(name, t), *quick.db.pc_of(name, t));
    const auto all = ground.tuples(name);
    const auto kept = lifted.db.tuples(name);
    std::vector<Tuple> gone;
    std::set_difference(all.begin(), all.end(), kept.begin(), kept.end(), std::back_inserter(gone));
    dropped += gone.size();
    // A dropped tuple is derivable in no single product.
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << inst.features) && !gone.empty(); ++c) {
      const Facts product = oracle::naive_eval(inst.program, inst.product(c));
      for (const auto& t : gone) EXPECT_FALSE(product.count(name) && product.at(name).count(t)) << name;
    }
  }
  EXPECT_EQ(lifted.stats.unsat_dropped, dropped);
  EXPECT_EQ(lifted.stats.output_facts, ground_stats.output_facts - lifted.stats.unsat_dropped);

  std::vector<PresenceCondition> pcs;
  for (const auto& name : counted_relations(inst.program))
    for (const auto& t : lifted.db.tuples(name)) pcs.push_back(*lifted.db.pc_of(name, t));
  EXPECT_EQ(lifted.stats.unique_pcs, featexpr::count_unique_pcs(pcs));
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomInstances, ::testing::Range<std::uint64_t>(1, 101));

TEST(BehaviourAlterationRandom, LiftingHoldsForTheBundle) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    std::mt19937_64 rng(seed);
    PcStore store;
    const std::size_t n = 1 + rng() % 6;
    for (std::size_t f = 0; f < n; ++f) store.features().intern("F" + std::to_string(f));
    Database db = empty_bundle_db(&store);
    auto pc = [&] {
      if (rng() % 3 == 0) return PresenceCondition::True();
      for (;;) {
        const PresenceCondition p = store.to_pc(oracle::random_expr(rng, n, 2));
        if (!p.is_false()) return p;
      }
    };
    auto sym = [&](const char* prefix, int range) { return prefix + std::to_string(rng() % range); };
    for (int i = 0; i < 25; ++i) db.add("varWrite", {sym("v", 8), sym("v", 8)}, pc(), &store);
    for (int i = 0; i < 8; ++i) db.add("write", {sym("f", 6), sym("v", 8)}, pc(), &store);
    for (int i = 0; i < 8; ++i) db.add("varInfFunc", {sym("v", 8), sym("f", 6)}, pc(), &store);
    for (int f = 0; f < 6; ++f) db.add("cFunction", {"f" + std::to_string(f), sym("C", 3)}, pc(), &store);
    const auto report = verify_lifting(bundle(), db, store);
    EXPECT_TRUE(report.passed) << "seed " << seed;
  }
}
