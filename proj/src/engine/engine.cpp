#include "liftdl/engine/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <set>

#include "liftdl/common/error.hpp"

namespace liftdl::engine {

using datalog::Relation;
using datalog::Symbol;
using datalog::Term;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// --- rule compilation ------------------------------------------------------------

struct Arg {
  enum class Kind {
    Const,  // compare with a symbol
    Bound,  // compare with a slot bound by an earlier atom
    Bind,   // first occurrence: bind the slot
    Same,   // compare with a slot bound earlier in the same atom
    Skip,   // wildcard
  };
  Kind kind = Kind::Skip;
  std::uint32_t value = 0;  // symbol or slot
};

struct Operand {
  bool is_const = false;
  std::uint32_t value = 0;  // symbol or slot
};

struct Check {
  Operand lhs, rhs;
  bool equal = true;
};

struct CompiledAtom {
  std::string relation;
  std::vector<Arg> args;
  Relation::Columns mask = 0;
  std::vector<Check> checks;  // constraints decidable once this atom is bound
};

struct CompiledRule {
  std::string head;
  std::vector<Operand> head_args;
  std::vector<CompiledAtom> body;
  std::vector<Check> ground_checks;  // constraints over constants only
  std::size_t slots = 0;
};

CompiledRule compile(const datalog::Rule& rule, datalog::SymbolTable& symbols) {
  CompiledRule out;
  out.head = rule.head.relation;
  std::map<std::string, std::uint32_t> slot;
  std::map<std::string, std::size_t> bound_at;  // variable → atom that binds it

  for (std::size_t i = 0; i < rule.body.size(); ++i) {
    const datalog::Atom& atom = rule.body[i];
    CompiledAtom a{atom.relation, {}, 0, {}};
    for (std::size_t c = 0; c < atom.args.size(); ++c) {
      const Term& t = atom.args[c];
      Arg arg;
      if (t.kind == Term::Kind::Constant) {
        arg = {Arg::Kind::Const, symbols.intern(t.text)};
        a.mask |= Relation::Columns{1} << c;
      } else if (t.kind == Term::Kind::Variable) {
        auto [it, fresh] = slot.try_emplace(t.text, static_cast<std::uint32_t>(slot.size()));
        if (fresh) {
          arg = {Arg::Kind::Bind, it->second};
          bound_at[t.text] = i;
        } else if (bound_at[t.text] < i) {
          arg = {Arg::Kind::Bound, it->second};
          a.mask |= Relation::Columns{1} << c;
        } else {
          arg = {Arg::Kind::Same, it->second};
        }
      }
      a.args.push_back(arg);
    }
    out.body.push_back(std::move(a));
  }
  out.slots = slot.size();

  auto operand = [&](const Term& t) {
    return t.kind == Term::Kind::Constant ? Operand{true, symbols.intern(t.text)} : Operand{false, slot.at(t.text)};
  };
  for (const datalog::Constraint& c : rule.constraints) {
    const Check check{operand(c.lhs), operand(c.rhs), c.equal};
    std::size_t at = 0;
    bool any_var = false;
    for (const Term* t : {&c.lhs, &c.rhs})
      if (t->kind == Term::Kind::Variable) {
        at = std::max(at, bound_at.at(t->text));
        any_var = true;
      }
    if (any_var) out.body[at].checks.push_back(check);
    else out.ground_checks.push_back(check);
  }
  for (const Term& t : rule.head.args) out.head_args.push_back(operand(t));
  return out;
}

// --- evaluation --------------------------------------------------------------------

using RelationMap = std::map<std::string, Relation, std::less<>>;

template <bool Lifted>
class Evaluator {
 public:
  Evaluator(const Program& program, Database& db, PcStore* store, const EvalOptions& opts, RunStats& stats)
      : program_(program), db_(db), store_(store), opts_(opts), stats_(stats) {
    if constexpr (Lifted) {
      ghosts_ = opts.collect_stats;
      if (opts.feature_model && opts.prune_with_fm_during_eval) fm_ = opts.feature_model->compiled();
    }
  }

  void run() {
    for (std::size_t s = 0; s < program_.strata.size(); ++s) stratum(s);
  }

 private:
  bool sat(PresenceCondition pc) {
    if constexpr (!Lifted) return true;
    if (pc.is_false()) return false;
    return fm_.is_true() || !store_->pc_and(pc, fm_).is_false();
  }

  void stratum(std::size_t index) {
    const datalog::Stratum& s = program_.strata[index];
    std::vector<CompiledRule> rules;
    for (std::size_t r : s.rules) rules.push_back(compile(program_.rules[r], db_.symbols()));
    const std::set<std::string, std::less<>> members(s.relations.begin(), s.relations.end());
    StratumStats st{s.relations, 0};

    RelationMap delta;
    for (const auto& rule : rules) evaluate(rule, -1, delta);
    delta = merge();
    notify(index, ++st.iterations);

    while (s.recursive && !delta.empty()) {
      for (const auto& rule : rules)
        for (std::size_t k = 0; k < rule.body.size(); ++k)
          if (members.count(rule.body[k].relation) && delta.count(rule.body[k].relation))
            evaluate(rule, static_cast<int>(k), delta);
      delta = merge();
      notify(index, ++st.iterations);
    }
    stats_.strata.push_back(std::move(st));
  }

  void notify(std::size_t stratum, std::size_t iteration) {
    if (opts_.observer) opts_.observer(db_, stratum, iteration);
  }

  /// Evaluates one rule, reading `delta` at body atom `delta_atom` (none when
  /// negative) and full relations elsewhere; results go to pending_.
  void evaluate(const CompiledRule& rule, int delta_atom, const RelationMap& delta) {
    for (const Check& c : rule.ground_checks)
      if ((c.lhs.value == c.rhs.value) != c.equal) return;
    rule_ = &rule;
    slots_.assign(rule.slots, 0);
    keys_.resize(rule.body.size());
    sources_.clear();
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
      const std::string& name = rule.body[i].relation;
      const Relation* rel = static_cast<int>(i) == delta_atom ? &delta.find(name)->second : db_.find(name);
      if (!rel || rel->empty()) return;
      sources_.push_back(rel);
      keys_[i].assign(rel->arity(), 0);
    }
    auto& head_rel = db_.relation(rule.head, rule.head_args.size());
    pending_.try_emplace(rule.head, head_rel.arity());
    head_.assign(rule.head_args.size(), 0);
    join(0, PresenceCondition::True());
  }

  bool passes(const std::vector<Check>& checks) const {
    for (const Check& c : checks) {
      const std::uint32_t l = c.lhs.is_const ? c.lhs.value : slots_[c.lhs.value];
      const std::uint32_t r = c.rhs.is_const ? c.rhs.value : slots_[c.rhs.value];
      if ((l == r) != c.equal) return false;
    }
    return true;
  }

  void join(std::size_t i, PresenceCondition pc) {
    if (i == rule_->body.size()) {
      for (std::size_t c = 0; c < head_.size(); ++c) {
        const Operand& o = rule_->head_args[c];
        head_[c] = o.is_const ? o.value : slots_[o.value];
      }
      pending_.find(rule_->head)->second.merge(head_, pc, Lifted ? store_ : nullptr);
      return;
    }
    const CompiledAtom& atom = rule_->body[i];
    const Relation& rel = *sources_[i];
    std::vector<Symbol>& key = keys_[i];
    for (std::size_t c = 0; c < atom.args.size(); ++c) {
      const Arg& a = atom.args[c];
      if (a.kind == Arg::Kind::Const) key[c] = a.value;
      else if (a.kind == Arg::Kind::Bound) key[c] = slots_[a.value];
    }

    auto visit = [&](std::size_t r) {
      const Relation::Row row = rel.row(r);
      for (std::size_t c = 0; c < atom.args.size(); ++c) {
        const Arg& a = atom.args[c];
        switch (a.kind) {
          case Arg::Kind::Const:
          case Arg::Kind::Bound:
            if (row[c] != key[c]) return;
            break;
          case Arg::Kind::Bind:
            slots_[a.value] = row[c];
            break;
          case Arg::Kind::Same:
            if (row[c] != slots_[a.value]) return;
            break;
          case Arg::Kind::Skip:
            break;
        }
      }
      if (!passes(atom.checks)) return;
      PresenceCondition next = pc;
      if constexpr (Lifted) {
        if (!pc.is_false()) {
          next = store_->pc_and(pc, rel.pc(r));
          if (!sat(next)) {
            if (!ghosts_) return;
            next = PresenceCondition::False();
          }
        }
      }
      join(i + 1, next);
    };

    if (atom.mask == 0) {
      for (std::size_t r = 0; r < rel.size(); ++r) visit(r);
    } else {
      for (std::uint32_t r : rel.lookup(atom.mask, key)) visit(r);
    }
  }

  /// Moves pending derivations into the database; returns the new delta.
  RelationMap merge() {
    RelationMap delta;
    for (auto& [name, pending] : pending_) {
      Relation& target = *db_.find(name);
      Relation fresh(target.arity());
      for (std::size_t i = 0; i < pending.size(); ++i) {
        const Relation::Row t = pending.row(i);
        const PresenceCondition d = pending.pc(i);
        const auto existing = target.find(t);
        if constexpr (Lifted) {
          if (!existing) {
            if (sat(d)) {
              target.append(t, d);
              fresh.append(t, d);
            } else if (ghosts_) {
              target.append(t, PresenceCondition::False());
              fresh.append(t, PresenceCondition::False());
            }
          } else {
            const PresenceCondition e = target.pc(*existing);
            const PresenceCondition gained = store_->pc_and_not(d, e);
            if (sat(gained)) {
              target.set_pc(*existing, store_->pc_or(e, d));
              fresh.append(t, gained);
            }
          }
        } else if (!existing) {
          target.append(t, PresenceCondition::True());
          fresh.append(t, PresenceCondition::True());
        }
      }
      if (!fresh.empty()) delta.emplace(name, std::move(fresh));
    }
    pending_.clear();
    return delta;
  }

  const Program& program_;
  Database& db_;
  PcStore* store_;
  const EvalOptions& opts_;
  RunStats& stats_;
  bool ghosts_ = false;
  PresenceCondition fm_ = PresenceCondition::True();

  RelationMap pending_;
  const CompiledRule* rule_ = nullptr;
  std::vector<const Relation*> sources_;
  std::vector<std::vector<Symbol>> keys_;
  std::vector<Symbol> slots_;
  std::vector<Symbol> head_;
};

/// Working copy of `db` with every declared relation present.
Database prepare(const Program& program, const Database& db, const PcStore* store, bool strip_pcs) {
  for (const auto& decl : program.decls) {
    const Relation* rel = db.find(decl.name);
    if (decl.input && !rel) throw Error("missing input relation '" + decl.name + "'");
    if (rel && rel->arity() != decl.arity())
      throw Error("relation '" + decl.name + "' has arity " + std::to_string(rel->arity()) + " in the database but " +
                  std::to_string(decl.arity()) + " in the program");
  }
  Database work(db.shared_symbols(), store);
  for (const auto& [name, rel] : db.relations()) {
    Relation& copy = work.relation(name, rel.arity());
    copy = rel;
    if (strip_pcs)
      for (std::size_t i = 0; i < copy.size(); ++i) copy.set_pc(i, PresenceCondition::True());
  }
  for (const auto& decl : program.decls) work.relation(decl.name, decl.arity());
  return work;
}

/// Rebuilds `rel` without the rows failing `keep`; returns how many went.
template <typename Keep>
std::size_t filter(Relation& rel, Keep keep) {
  Relation kept(rel.arity());
  for (std::size_t i = 0; i < rel.size(); ++i)
    if (keep(rel.pc(i))) kept.append(rel.row(i), rel.pc(i));
  const std::size_t removed = rel.size() - kept.size();
  if (removed) rel = std::move(kept);
  return removed;
}

void count_outputs(const Program& program, const Database& db, RunStats& stats) {
  std::vector<PresenceCondition> pcs;
  stats.output_facts = 0;
  stats.output_facts_with_pc = 0;
  for (const std::string& name : counted_relations(program)) {
    const Relation* rel = db.find(name);
    if (!rel) continue;
    stats.output_facts += rel->size();
    for (std::size_t i = 0; i < rel->size(); ++i) {
      pcs.push_back(rel->pc(i));
      if (!rel->pc(i).is_true()) ++stats.output_facts_with_pc;
    }
  }
  stats.output_facts_with_pc_percent =
      stats.output_facts ? 100.0 * static_cast<double>(stats.output_facts_with_pc) / static_cast<double>(stats.output_facts)
                         : 0.0;
  stats.unique_pcs = featexpr::count_unique_pcs(pcs);
}

}  // namespace

std::vector<std::string> counted_relations(const Program& program) {
  std::vector<std::string> out = program.outputs();
  return out.empty() ? program.derived() : out;
}

std::string RunStats::to_text() const {
  char percent[32];
  std::snprintf(percent, sizeof percent, "%.2f", output_facts_with_pc_percent);
  std::string out;
  out += "output_facts: " + std::to_string(output_facts) + "\n";
  out += "output_facts_with_pc: " + std::to_string(output_facts_with_pc) + "\n";
  out += "output_facts_with_pc_percent: " + std::string(percent) + "\n";
  out += "unique_pcs: " + std::to_string(unique_pcs) + "\n";
  out += "unsat_dropped: " + std::to_string(unsat_dropped) + "\n";
  out += "fm_removed: " + std::to_string(fm_removed) + "\n";
  out += "eval_seconds: " + std::to_string(eval_seconds) + "\n";
  out += "fm_seconds: " + std::to_string(fm_seconds) + "\n";
  for (std::size_t i = 0; i < strata.size(); ++i) {
    std::string names;
    for (const auto& r : strata[i].relations) names += (names.empty() ? "" : ",") + r;
    out += "stratum." + std::to_string(i) + ": " + names + " iterations=" + std::to_string(strata[i].iterations) + "\n";
  }
  return out;
}

EvalResult evaluate_lifted(const Program& program, const Database& db, PcStore& store, const EvalOptions& opts) {
  if (db.store() && db.store() != &store) throw Error("database PCs belong to a different PcStore");
  EvalResult result{prepare(program, db, &store, false), {}};
  RunStats& stats = result.stats;

  const auto start = Clock::now();
  Evaluator<true>(program, result.db, &store, opts, stats).run();

  // Tuples that only ever had unsatisfiable derivations were kept (with a
  // false PC) to mirror the unlifted tuple universe; count and drop them.
  const auto counted = counted_relations(program);
  for (const std::string& name : program.derived()) {
    const std::size_t ghosts = filter(*result.db.find(name), [](PresenceCondition pc) { return !pc.is_false(); });
    if (std::find(counted.begin(), counted.end(), name) != counted.end()) stats.unsat_dropped += ghosts;
  }
  stats.eval_seconds = seconds_since(start);

  if (opts.feature_model) {
    const auto fm_start = Clock::now();
    stats.fm_removed = apply_feature_model(result.db, store, *opts.feature_model, program.derived());
    stats.fm_seconds = seconds_since(fm_start);
  }
  count_outputs(program, result.db, stats);
  return result;
}

Database ground_eval(const Program& program, const Database& db, RunStats* stats) {
  Database work = prepare(program, db, nullptr, true);
  RunStats local;
  const auto start = Clock::now();
  Evaluator<false>(program, work, nullptr, EvalOptions{}, local).run();
  local.eval_seconds = seconds_since(start);
  count_outputs(program, work, local);
  if (stats) *stats = std::move(local);
  return work;
}

Database project(const Database& db, const PcStore& store, const Configuration& rho) {
  Database out(db.shared_symbols());
  for (const auto& [name, rel] : db.relations()) {
    Relation& target = out.relation(name, rel.arity());
    for (std::size_t i = 0; i < rel.size(); ++i)
      if (store.evaluate(rel.pc(i), rho)) target.append(rel.row(i), PresenceCondition::True());
  }
  return out;
}

std::size_t apply_feature_model(Database& db, PcStore& store, const FeatureModel& fm,
                                const std::vector<std::string>& relations) {
  const PresenceCondition model = fm.compiled();
  if (model.is_true()) return 0;
  auto keep = [&](PresenceCondition pc) { return !store.pc_and(pc, model).is_false(); };
  std::size_t removed = 0;
  if (relations.empty()) {
    for (const auto& [name, rel] : db.relations()) removed += filter(*db.find(name), keep);
  } else {
    for (const std::string& name : relations)
      if (Relation* rel = db.find(name)) removed += filter(*rel, keep);
  }
  return removed;
}

LiftingReport verify_lifting(const Program& program, const Database& db, PcStore& store, std::size_t max_features) {
  const std::size_t n = store.features().size();
  if (n > max_features)
    throw Error("verify_lifting: " + std::to_string(n) + " features exceed the limit of " + std::to_string(max_features));
  const Database lifted = evaluate_lifted(program, db, store).db;
  const auto derived = program.derived();

  LiftingReport report;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const Configuration rho = Configuration::from_bits(n, bits);
    const Database from_lifted = project(lifted, store, rho);
    const Database from_product = ground_eval(program, project(db, store, rho));
    ++report.configurations;
    for (const std::string& name : derived) {
      const auto a = from_lifted.tuples(name);
      const auto b = from_product.tuples(name);
      if (a == b) continue;
      std::vector<std::vector<std::string>> only_a, only_b;
      std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
      std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
      report.mismatches += only_a.size() + only_b.size();
      for (auto* side : {&only_a, &only_b})
        for (auto& t : *side)
          if (report.counterexamples.size() < 20)
            report.counterexamples.push_back({rho.describe(store.features()), name, t, side == &only_a});
    }
  }
  report.passed = report.mismatches == 0;
  return report;
}

}  // namespace liftdl::engine
