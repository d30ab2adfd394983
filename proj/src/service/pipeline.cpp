#include "liftdl/service/pipeline.hpp"

#include <fstream>

#include "json.hpp"
#include "liftdl/extractor/extractor.hpp"
#include "liftdl/extractor/minic_parser.hpp"
#include "liftdl/featexpr/feature_model.hpp"
#include "liftdl/tamodel/ta.hpp"

namespace liftdl::service {

namespace {

template <typename F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

void require(const fs::path& path, const char* what) {
  if (!fs::exists(path)) throw Error(std::string(what) + " not found: " + path.string());
}

fs::path extract_into(const fs::path& source_dir, const fs::path& config, const fs::path& out_dir,
                      featexpr::PcStore& store) {
  return stage("extract", [&] {
    require(source_dir, "source directory");
    require(config, "extraction config");
    const auto cfg = extract::ExtractionConfig::load(config);
    const auto units = extract::parse_source_tree(source_dir);
    const auto result = extract::extract(units, cfg, store);
    fs::create_directories(out_dir);
    const fs::path out = out_dir / "model.ta";
    write_file(out, ta::emit_ta(result.graph));
    return out;
  });
}

}  // namespace

fs::path cmd_extract(const fs::path& source_dir, const fs::path& config, const fs::path& out_dir) {
  featexpr::PcStore store;
  return extract_into(source_dir, config, out_dir, store);
}

void cmd_ta2tsv(const fs::path& ta_file, const fs::path& facts_dir) {
  stage("ta2tsv", [&] {
    require(ta_file, "TA file");
    ta::write_ta2tsv(ta::load_ta(ta_file), facts_dir);
    return 0;
  });
}

std::string stats_json(const engine::RunStats& stats) {
  nlohmann::ordered_json doc;
  doc["output_facts"] = stats.output_facts;
  doc["output_facts_with_pc"] = stats.output_facts_with_pc;
  doc["output_facts_with_pc_percent"] = stats.output_facts_with_pc_percent;
  doc["unique_pcs"] = stats.unique_pcs;
  doc["unsat_dropped"] = stats.unsat_dropped;
  doc["fm_removed"] = stats.fm_removed;
  doc["eval_seconds"] = stats.eval_seconds;
  doc["fm_seconds"] = stats.fm_seconds;
  doc["strata"] = nlohmann::ordered_json::array();
  for (const auto& s : stats.strata)
    doc["strata"].push_back(nlohmann::ordered_json{{"relations", s.relations}, {"iterations", s.iterations}});
  return doc.dump(2) + "\n";
}

SolveOutcome cmd_solve(const SolveOptions& opts, featexpr::PcStore& store) {
  return stage("solve", [&] {
    require(opts.facts_dir, "facts directory");
    SolveOutcome out;
    if (opts.rules) {
      require(*opts.rules, "rules file");
      out.program = datalog::load_program(*opts.rules);
    } else {
      out.program = analysis::behaviour_alteration_program().program;
    }
    std::optional<featexpr::FeatureModel> fm;
    if (opts.feature_model) {
      require(*opts.feature_model, "feature model");
      fm = featexpr::FeatureModel::load(*opts.feature_model, store);
    }
    auto loaded = datalog::load_facts(opts.facts_dir, out.program, store);
    out.input_rows = loaded.rows;
    out.input_unsat_dropped = loaded.unsat_dropped;

    engine::EvalOptions eval;
    eval.feature_model = fm ? &*fm : nullptr;
    eval.collect_stats = opts.stats;
    eval.prune_with_fm_during_eval = opts.prune_with_fm_during_eval;
    auto result = engine::evaluate_lifted(out.program, loaded.db, store, eval);
    out.db = std::move(result.db);
    out.stats = std::move(result.stats);

    fs::create_directories(opts.out_dir);
    for (const std::string& name : engine::counted_relations(out.program))
      datalog::write_facts(out.db, name, &store, opts.out_dir / (name + ".facts"));
    if (opts.stats) {
      write_file(opts.out_dir / "stats.txt", out.stats.to_text());
      write_file(opts.out_dir / "stats.json", stats_json(out.stats));
    }
    return out;
  });
}

analysis::ComponentGraph cmd_analyze(const AnalyzeOptions& opts, featexpr::PcStore& store) {
  // Extracting into `store` registers every feature, so the graph lists
  // those that label no fact too.
  const fs::path ta_file = extract_into(opts.source_dir, opts.config, opts.out_dir, store);
  const fs::path facts = opts.out_dir / "facts";
  cmd_ta2tsv(ta_file, facts);
  SolveOptions solve{facts, opts.out_dir / "results", opts.rules, opts.feature_model, opts.stats, false};
  const SolveOutcome solved = cmd_solve(solve, store);
  return stage("analyze", [&] {
    auto graph = analysis::build_component_graph(solved.db, store);
    write_file(opts.out_dir / "graph.json", analysis::export_graph_json(graph, store));
    return graph;
  });
}

}  // namespace liftdl::service
