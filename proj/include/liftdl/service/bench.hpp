#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "liftdl/datalog/database.hpp"
#include "liftdl/featexpr/pc_store.hpp"

namespace liftdl::service {

/// Synthetic behaviour-alteration factbase.
struct SyntheticParams {
  std::size_t tuples = 100000;  // input tuples over the four input relations
  std::size_t features = 500;
  double variational_percent = 1.0;  // share of input tuples with a PC other than true
  /// Contradictory write/guard pairs; each yields exactly one behAlter tuple
  /// whose only derivation is unsatisfiable. 0 picks a tenth of the
  /// variational budget (at least one when the budget allows).
  std::size_t planted = 0;
  std::size_t components = 20;
  std::uint64_t seed = 1;
};

struct SyntheticInstance {
  datalog::Database db;
  std::size_t tuples = 0;
  std::size_t variational = 0;
  std::size_t planted = 0;
};

/// Chains of varWrite between a writing function and a guarded call, with
/// the functions spread over components. Background PCs are conjunctions of
/// positive literals, so no background join is ever unsatisfiable; planted
/// pairs use fresh names and the PCs F and !F. Features are `F0`... and are
/// registered in `store` in index order.
SyntheticInstance generate_synthetic(const SyntheticParams& params, featexpr::PcStore& store);

/// Mean after dropping one minimum and one maximum (plain mean below three samples).
double trimmed_mean(std::vector<double> samples);

struct BenchReport {
  SyntheticParams params;
  std::size_t runs = 5;
  std::size_t input_tuples = 0;
  std::size_t variational_facts = 0;
  std::size_t planted = 0;
  std::size_t ground_output_facts = 0;   // the 150% run
  std::size_t lifted_output_facts = 0;
  std::size_t unsat_dropped = 0;
  std::size_t output_fact_delta = 0;     // ground − lifted
  std::size_t output_facts_with_pc = 0;
  std::size_t unique_pcs = 0;
  bool lifted_subset_of_ground = false;  // every lifted tuple is in the 150% result
  std::vector<double> ground_seconds;
  std::vector<double> lifted_seconds;
  double ground_mean = 0;
  double lifted_mean = 0;
  double overhead_percent = 0;  // (lifted − ground) / ground × 100

  /// `key: value` lines; timing lines only with `timings`.
  std::string to_text(bool timings = true) const;
  std::string to_json(bool timings = true) const;
};

/// Runs the 150% evaluation (PCs ignored) and the lifted evaluation `runs`
/// times each on one generated instance and compares them.
BenchReport run_bench(const SyntheticParams& params, std::size_t runs = 5);

}  // namespace liftdl::service
