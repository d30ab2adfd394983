// liftdl: extract → ta2tsv → solve → analyze pipeline, benchmark and graph server.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "liftdl/service/bench.hpp"
#include "liftdl/service/pipeline.hpp"
#include "liftdl/service/server.hpp"

namespace fs = std::filesystem;
using namespace liftdl;
using namespace liftdl::service;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

HttpServer* running = nullptr;

void on_signal(int) {
  if (running) running->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variability-aware fact extraction and Datalog analysis"};
  app.require_subcommand(1);

  fs::path src, config, out, ta_file, facts, rules, fm, graph;
  bool stats = false, fm_during_eval = false, no_fm = false, timings = true;

  auto* extract = app.add_subcommand("extract", "Extract a TA fact model from mini-C sources");
  extract->add_option("--src", src, "Source tree")->required();
  extract->add_option("--config", config, "Extraction config (INI)")->required();
  extract->add_option("-o,--out", out, "Output directory (model.ta)")->required();

  auto* ta2tsv = app.add_subcommand("ta2tsv", "Convert a TA model to .facts files");
  ta2tsv->add_option("--ta", ta_file, "TA file")->required();
  ta2tsv->add_option("-o,--out", out, "Facts directory")->required();

  auto* solve = app.add_subcommand("solve", "Run a Datalog program with presence conditions");
  solve->add_option("--facts", facts, "Facts directory")->required();
  solve->add_option("--rules", rules, "Datalog program (default: behaviour alteration)");
  solve->add_option("--feature-model", fm, "Feature model");
  solve->add_flag("--stats", stats, "Write stats.txt and stats.json");
  solve->add_flag("--fm-during-eval", fm_during_eval, "Also prune with the feature model while evaluating");
  solve->add_option("-o,--out", out, "Results directory")->required();

  auto* analyze = app.add_subcommand("analyze", "extract, ta2tsv, solve and build graph.json");
  analyze->add_option("--src", src, "Source tree")->required();
  analyze->add_option("--config", config, "Extraction config (INI)")->required();
  analyze->add_option("--rules", rules, "Datalog program (default: behaviour alteration)");
  analyze->add_option("--feature-model", fm, "Feature model");
  analyze->add_flag("--stats", stats, "Write stats.txt and stats.json");
  analyze->add_option("-o,--out", out, "Output directory")->required();

  SyntheticParams params;
  std::size_t runs = 5;
  auto* bench = app.add_subcommand("bench", "Compare the 150% and lifted runs on a synthetic factbase");
  bench->add_option("--tuples", params.tuples, "Input tuples")->capture_default_str();
  bench->add_option("--features", params.features, "Features")->capture_default_str();
  bench->add_option("--variational", params.variational_percent, "Percent of facts with a PC")->capture_default_str();
  bench->add_option("--planted", params.planted, "Planted contradictions (0: automatic)")->capture_default_str();
  bench->add_option("--components", params.components, "Components")->capture_default_str();
  bench->add_option("--seed", params.seed, "Generator seed")->capture_default_str();
  bench->add_option("--runs", runs, "Repetitions")->capture_default_str();
  bench->add_flag("!--no-timings", timings, "Omit timing lines");
  bench->add_option("-o,--out", out, "Write report.txt and report.json here");

  std::optional<int> port;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Serve GET /graph and POST /filter");
  serve->add_option("--graph", graph, "graph.json")->required();
  serve->add_option("--feature-model", fm, "Feature model used when filtering");
  serve->add_flag("--no-fm", no_fm, "Ignore the feature model when filtering");
  serve->add_option("--port", port, "Port (default: $LIFTDL_PORT, else 8080)");
  serve->add_option("--host", host, "Address to bind")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    auto optional = [](const fs::path& p) { return p.empty() ? std::nullopt : std::optional<fs::path>(p); };
    if (*extract) {
      std::cout << cmd_extract(src, config, out).string() << "\n";
    } else if (*ta2tsv) {
      cmd_ta2tsv(ta_file, out);
    } else if (*solve) {
      featexpr::PcStore store;
      const auto r = cmd_solve({facts, out, optional(rules), optional(fm), stats, fm_during_eval}, store);
      if (stats) std::cout << r.stats.to_text();
    } else if (*analyze) {
      featexpr::PcStore store;
      const auto g = cmd_analyze({src, config, out, optional(rules), optional(fm), stats}, store);
      std::cout << (out / "graph.json").string() << ": " << g.nodes.size() << " components, " << g.edges.size()
                << " edges\n";
    } else if (*bench) {
      const BenchReport report = run_bench(params, runs);
      std::cout << report.to_text(timings);
      if (!out.empty()) {
        fs::create_directories(out);
        std::ofstream(out / "report.txt") << report.to_text(timings);
        std::ofstream(out / "report.json") << report.to_json(timings);
      }
    } else if (*serve) {
      std::optional<std::string> fm_text;
      if (!fm.empty()) fm_text = read_file(fm);
      GraphService service(read_file(graph), fm_text, !no_fm);
      HttpServer server(service);
      const int bound = server.bind(host, resolve_port(port));
      std::cout << "serving http://" << host << ":" << bound << std::endl;
      running = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.run();
    }
  } catch (const StageError& e) {
    std::cerr << "liftdl: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "liftdl: " << app.get_subcommands().front()->get_name() << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
