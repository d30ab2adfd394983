#pragma once

#include <functional>
#include <string>
#include <vector>

#include "liftdl/datalog/database.hpp"
#include "liftdl/datalog/program.hpp"
#include "liftdl/featexpr/feature_model.hpp"
#include "liftdl/featexpr/pc_store.hpp"

namespace liftdl::engine {

using datalog::Database;
using datalog::Program;
using featexpr::Configuration;
using featexpr::FeatureModel;
using featexpr::PcStore;
using featexpr::PresenceCondition;

struct EvalOptions {
  /// Post-filter (and, with prune_with_fm_during_eval, evaluation-time
  /// satisfiability modulo) this model. Must use the evaluation store.
  const FeatureModel* feature_model = nullptr;
  /// Track tuples whose every derivation is unsatisfiable so that
  /// RunStats::unsat_dropped is exact. Costs the joins of the unlifted run.
  bool collect_stats = false;
  bool prune_with_fm_during_eval = false;
  /// Called after every merge with the database under construction, the
  /// stratum index and the iteration within it.
  std::function<void(const Database&, std::size_t, std::size_t)> observer;
};

struct StratumStats {
  std::vector<std::string> relations;
  std::size_t iterations = 0;
};

struct RunStats {
  double eval_seconds = 0;
  double fm_seconds = 0;
  /// Tuples in the counted relations (the `.output` relations, or every
  /// derived relation when none is marked) after feature-model filtering.
  std::size_t output_facts = 0;
  std::size_t output_facts_with_pc = 0;  // PC not equivalent to true
  double output_facts_with_pc_percent = 0;
  std::size_t unique_pcs = 0;  // distinct non-true PCs among counted tuples
  /// Counted-relation tuples derivable in the unlifted run whose every
  /// derivation had an unsatisfiable PC. Only computed with collect_stats.
  std::size_t unsat_dropped = 0;
  std::size_t fm_removed = 0;
  std::vector<StratumStats> strata;

  /// `key: value` lines.
  std::string to_text() const;
};

struct EvalResult {
  Database db;
  RunStats stats;
};

/// Lifted semi-naive evaluation. The result holds the input relations and
/// every derived relation; all stored PCs are satisfiable (modulo the feature
/// model when one is given). Throws Error for a missing input relation or a
/// database tied to another store.
EvalResult evaluate_lifted(const Program& program, const Database& db, PcStore& store, const EvalOptions& opts = {});

/// Classical semi-naive evaluation; PCs of `db` are ignored and the result
/// has no store. `stats` receives iteration counts and output totals.
Database ground_eval(const Program& program, const Database& db, RunStats* stats = nullptr);

/// Tuples whose PC holds under `rho`, without PCs.
Database project(const Database& db, const PcStore& store, const Configuration& rho);

/// Drops tuples whose PC contradicts the model; returns how many. With
/// `relations` empty every relation is filtered.
std::size_t apply_feature_model(Database& db, PcStore& store, const FeatureModel& fm,
                                const std::vector<std::string>& relations = {});

/// Relations counted by RunStats: the `.output` ones, else all derived ones.
std::vector<std::string> counted_relations(const Program& program);

struct Counterexample {
  std::string configuration;  // Configuration::describe
  std::string relation;
  std::vector<std::string> tuple;
  bool in_lifted = false;  // present in the projected lifted result only (else in the product run only)
};

struct LiftingReport {
  bool passed = true;
  std::size_t configurations = 0;
  std::size_t mismatches = 0;
  std::vector<Counterexample> counterexamples;  // first few mismatches
};

/// Checks project(evaluate_lifted(db), rho) == ground_eval(project(db, rho))
/// on every derived relation for all 2^n configurations of the store's
/// features. Throws Error when there are more than `max_features`.
LiftingReport verify_lifting(const Program& program, const Database& db, PcStore& store,
                             std::size_t max_features = 12);

}  // namespace liftdl::engine
