#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "liftdl/analysis/analysis.hpp"
#include "liftdl/common/error.hpp"
#include "liftdl/datalog/database.hpp"
#include "liftdl/engine/engine.hpp"
#include "liftdl/featexpr/pc_store.hpp"

namespace liftdl::service {

namespace fs = std::filesystem;

/// Failure of one pipeline stage; what() is prefixed with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what) : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Parses the sources below `source_dir` and writes `<out_dir>/model.ta`.
/// Returns the path written.
fs::path cmd_extract(const fs::path& source_dir, const fs::path& config, const fs::path& out_dir);

/// Converts a TA file into `<relation>.facts` files in `facts_dir`.
void cmd_ta2tsv(const fs::path& ta_file, const fs::path& facts_dir);

struct SolveOptions {
  fs::path facts_dir;
  fs::path out_dir;
  std::optional<fs::path> rules;  // bundled behaviour-alteration program when absent
  std::optional<fs::path> feature_model;
  bool stats = false;  // write stats.txt and stats.json, with exact unsat counts
  bool prune_with_fm_during_eval = false;
};

struct SolveOutcome {
  datalog::Program program;
  datalog::Database db;  // inputs and derived relations
  engine::RunStats stats;
  std::size_t input_rows = 0;
  std::size_t input_unsat_dropped = 0;
};

/// Loads the facts, evaluates the program and writes one `.facts` file per
/// counted relation (with the PC column) into `out_dir`. `store` may already
/// hold features, which keeps their order.
SolveOutcome cmd_solve(const SolveOptions& opts, featexpr::PcStore& store);

/// `stats` as a JSON object with the RunStats field names.
std::string stats_json(const engine::RunStats& stats);

struct AnalyzeOptions {
  fs::path source_dir;
  fs::path config;
  fs::path out_dir;
  std::optional<fs::path> rules;
  std::optional<fs::path> feature_model;
  bool stats = false;
};

/// extract → ta2tsv → solve → component graph. Writes `model.ta`, `facts/`,
/// `results/` and `graph.json` into `out_dir`.
analysis::ComponentGraph cmd_analyze(const AnalyzeOptions& opts, featexpr::PcStore& store);

}  // namespace liftdl::service
