#pragma once

// Seeded random positive Datalog programs and annotated databases for the
// lifting properties. PCs are kept as syntax trees so the oracle can decide
// presence with truth tables instead of the decision diagrams under test.

#include <random>
#include <string>
#include <vector>

#include "liftdl/datalog/database.hpp"
#include "liftdl/datalog/program.hpp"
#include "support/naive_datalog.hpp"
#include "support/truth_table.hpp"

namespace liftdl::testing {

struct RandomFact {
  std::string relation;
  Tuple tuple;
  FeatureExpr pc;
};

struct RandomInstance {
  std::string text;
  datalog::Program program;
  std::size_t features = 0;
  std::vector<RandomFact> facts;

  /// Registers F0..F{n-1} and loads the facts with their PCs.
  datalog::Database database(featexpr::PcStore& store, bool strip_pcs = false) const {
    for (std::size_t f = 0; f < features; ++f) store.features().intern("F" + std::to_string(f));
    datalog::Database db(std::make_shared<datalog::SymbolTable>(), &store);
    for (const auto& d : program.decls)
      if (d.input) db.relation(d.name, d.arity());
    for (const auto& f : facts)
      db.add(f.relation, f.tuple, strip_pcs ? featexpr::PresenceCondition::True() : store.to_pc(f.pc), &store);
    return db;
  }

  /// Input facts present in configuration `config` (bit i = feature i).
  Facts product(std::uint64_t config) const {
    Facts out;
    for (const auto& d : program.decls)
      if (d.input) out[d.name];
    for (const auto& f : facts)
      if (TruthTable::of(f.pc, features).at(config)) out[f.relation].insert(f.tuple);
    return out;
  }

  Facts all_facts() const {
    Facts out;
    for (const auto& d : program.decls)
      if (d.input) out[d.name];
    for (const auto& f : facts) out[f.relation].insert(f.tuple);
    return out;
  }
};

/// At most `max_rules` rules over inputs e0/2, e1/2, e2/1 and derived
/// d0/2, d1/2, d2/1; at most `max_tuples` facts over `max_features` features.
inline RandomInstance random_instance(std::uint64_t seed, std::size_t max_features = 8, std::size_t max_tuples = 200,
                                      int max_rules = 5) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  struct Rel {
    const char* name;
    int arity;
    bool input;
  };
  static const Rel kRels[] = {{"e0", 2, true}, {"e1", 2, true}, {"e2", 1, true},
                              {"d0", 2, false}, {"d1", 2, false}, {"d2", 1, false}};
  static const char* kVars[] = {"x", "y", "z", "w"};
  const int domain = pick(3, 10);
  auto constant = [&] { return "c" + std::to_string(pick(0, domain - 1)); };

  std::string text;
  for (const Rel& r : kRels) {
    text += ".decl " + std::string(r.name) + "(a: symbol" + (r.arity == 2 ? ", b: symbol" : "") + ")\n";
  }
  text += ".input e0, e1, e2\n.output d0, d1, d2\n";

  for (int n = pick(1, max_rules), i = 0; i < n; ++i) {
    const Rel& head = kRels[pick(3, 5)];
    std::vector<std::string> bound;
    std::string body;
    for (int atoms = pick(1, 3), a = 0; a < atoms; ++a) {
      const Rel& r = kRels[pick(0, 5)];
      body += (a ? ", " : "") + std::string(r.name) + "(";
      for (int c = 0; c < r.arity; ++c) {
        const int k = pick(0, 19);
        std::string term;
        if (k < 15) {
          term = kVars[pick(0, 3)];
          bound.push_back(term);
        } else if (k < 17) {
          term = "\"" + constant() + "\"";
        } else {
          term = "_";
        }
        body += (c ? ", " : "") + term;
      }
      body += ")";
    }
    if (!bound.empty() && pick(0, 2) == 0) {
      const std::string lhs = bound[pick(0, static_cast<int>(bound.size()) - 1)];
      const std::string rhs =
          pick(0, 1) ? bound[pick(0, static_cast<int>(bound.size()) - 1)] : "\"" + constant() + "\"";
      body += ", " + lhs + (pick(0, 1) ? " != " : " = ") + rhs;
    }
    std::string head_text = std::string(head.name) + "(";
    for (int c = 0; c < head.arity; ++c) {
      const std::string term =
          bound.empty() || pick(0, 9) == 0 ? "\"" + constant() + "\"" : bound[pick(0, static_cast<int>(bound.size()) - 1)];
      head_text += (c ? ", " : "") + term;
    }
    text += head_text + ") :- " + body + ".\n";
  }

  RandomInstance inst;
  inst.text = text;
  inst.program = datalog::parse_program(text);
  inst.features = static_cast<std::size_t>(pick(0, static_cast<int>(max_features)));
  for (int n = pick(0, static_cast<int>(max_tuples)), i = 0; i < n; ++i) {
    const Rel& r = kRels[pick(0, 2)];
    Tuple t;
    for (int c = 0; c < r.arity; ++c) t.push_back(constant());
    FeatureExpr pc = FeatureExpr::constant(true);
    if (inst.features > 0 && pick(0, 4) > 1) {
      do pc = random_expr(rng, inst.features, pick(1, 3));
      while (!TruthTable::of(pc, inst.features).any());
    }
    inst.facts.push_back({r.name, std::move(t), std::move(pc)});
  }
  return inst;
}

}  // namespace liftdl::testing
