#pragma once

// Deliberately simple Datalog evaluator used as a test oracle: naive
// iteration over string tuples with no indexes, deltas or PCs.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "liftdl/datalog/program.hpp"

namespace liftdl::testing {

using Tuple = std::vector<std::string>;
using Facts = std::map<std::string, std::set<Tuple>>;

inline void naive_match(const datalog::Rule& rule, std::size_t i, std::map<std::string, std::string>& env,
                        const Facts& facts, std::set<Tuple>& out) {
  using datalog::Term;
  auto value = [&](const Term& t) { return t.kind == Term::Kind::Constant ? t.text : env.at(t.text); };
  if (i == rule.body.size()) {
    for (const auto& c : rule.constraints)
      if ((value(c.lhs) == value(c.rhs)) != c.equal) return;
    Tuple head;
    for (const Term& t : rule.head.args) head.push_back(value(t));
    out.insert(head);
    return;
  }
  const auto& atom = rule.body[i];
  auto it = facts.find(atom.relation);
  if (it == facts.end()) return;
  std::vector<std::string> bound;
  for (const Tuple& t : it->second) {
    bool ok = true;
    for (std::size_t c = 0; c < t.size() && ok; ++c) {
      const Term& a = atom.args[c];
      if (a.kind == Term::Kind::Constant) {
        ok = a.text == t[c];
      } else if (a.kind == Term::Kind::Variable) {
        auto [slot, fresh] = env.try_emplace(a.text, t[c]);
        if (fresh) bound.push_back(a.text);
        ok = fresh || slot->second == t[c];
      }
    }
    if (ok) naive_match(rule, i + 1, env, facts, out);
    for (const auto& v : bound) env.erase(v);
    bound.clear();
  }
}

/// Least fixpoint of `program` over `facts` (all rules at once, no strata).
inline Facts naive_eval(const datalog::Program& program, Facts facts) {
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& rule : program.rules) {
      std::set<Tuple> derived;
      std::map<std::string, std::string> env;
      naive_match(rule, 0, env, facts, derived);
      auto& target = facts[rule.head.relation];
      for (const auto& t : derived) changed |= target.insert(t).second;
    }
  }
  return facts;
}

}  // namespace liftdl::testing
