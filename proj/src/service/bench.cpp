#include "liftdl/service/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <random>

#include "json.hpp"
#include "liftdl/analysis/analysis.hpp"
#include "liftdl/common/error.hpp"
#include "liftdl/engine/engine.hpp"

namespace liftdl::service {

using featexpr::PresenceCondition;

namespace {

struct Fact {
  const char* relation;
  std::string a, b;
  PresenceCondition pc = PresenceCondition::True();
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

SyntheticInstance generate_synthetic(const SyntheticParams& params, featexpr::PcStore& store) {
  std::mt19937_64 rng(params.seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };

  const std::size_t total = params.tuples;
  const auto variational = static_cast<std::size_t>(static_cast<double>(total) * params.variational_percent / 100.0);
  if (variational > 0 && params.features == 0) throw Error("synthetic: variational facts need at least one feature");
  const std::size_t planted =
      params.planted ? params.planted : (variational >= 2 ? std::max<std::size_t>(1, variational / 10) : 0);
  if (2 * planted > variational) throw Error("synthetic: planted contradictions exceed the variational budget");
  if (5 * planted > total) throw Error("synthetic: too few tuples for the planted contradictions");
  if (params.components < 2) throw Error("synthetic: at least two components are needed");

  std::vector<PresenceCondition> feature(params.features);
  for (std::size_t f = 0; f < params.features; ++f) feature[f] = store.var(store.features().intern("F" + std::to_string(f)));
  auto component = [&] { return "C" + std::to_string(uniform(0, params.components - 1)); };
  auto other_component = [&](const std::string& c) {
    for (;;)
      if (auto d = component(); d != c) return d;
  };

  std::vector<Fact> facts;
  facts.reserve(total);
  std::vector<std::size_t> eligible;  // background facts that may carry a PC
  std::size_t next_function = 0, next_variable = 0;
  auto fresh_function = [&] { return "f" + std::to_string(next_function++); };
  auto fresh_variable = [&] { return "v" + std::to_string(next_variable++); };

  for (std::size_t i = 0; i < planted; ++i) {
    const PresenceCondition f = feature[uniform(0, params.features - 1)];
    const std::string writer = fresh_function(), reader = fresh_function();
    const std::string v = fresh_variable(), u = fresh_variable();
    const std::string c = component();
    facts.push_back({"write", writer, v, f});
    facts.push_back({"varWrite", v, u});
    facts.push_back({"varInfFunc", u, reader, store.pc_not(f)});
    facts.push_back({"cFunction", writer, c});
    facts.push_back({"cFunction", reader, other_component(c)});
  }

  while (facts.size() < total) {
    const std::size_t room = total - facts.size();
    const std::size_t length = uniform(2, 5), readers = uniform(1, 2);
    const std::size_t size = (length - 1) + 1 + readers + 1 + readers;
    if (size > room) {
      facts.push_back({"varWrite", fresh_variable(), fresh_variable()});
      eligible.push_back(facts.size() - 1);
      continue;
    }
    std::vector<std::string> chain;
    for (std::size_t k = 0; k < length; ++k) chain.push_back(fresh_variable());
    for (std::size_t k = 0; k + 1 < length; ++k) {
      facts.push_back({"varWrite", chain[k], chain[k + 1]});
      eligible.push_back(facts.size() - 1);
    }
    const std::string writer = fresh_function();
    facts.push_back({"write", writer, chain[0]});
    eligible.push_back(facts.size() - 1);
    facts.push_back({"cFunction", writer, component()});
    for (std::size_t r = 0; r < readers; ++r) {
      const std::string reader = fresh_function();
      facts.push_back({"varInfFunc", chain[r == 0 ? length - 1 : uniform(0, length - 1)], reader});
      eligible.push_back(facts.size() - 1);
      facts.push_back({"cFunction", reader, component()});
    }
  }

  const std::size_t background = variational - 2 * planted;
  if (background > eligible.size()) throw Error("synthetic: variational share too large for the factbase shape");
  for (std::size_t i = 0; i < background; ++i) {
    std::swap(eligible[i], eligible[uniform(i, eligible.size() - 1)]);
    PresenceCondition pc = feature[uniform(0, params.features - 1)];
    if (params.features > 1 && uniform(0, 1) == 1) {
      for (;;) {
        const PresenceCondition g = feature[uniform(0, params.features - 1)];
        if (g == pc) continue;
        pc = store.pc_and(pc, g);
        break;
      }
    }
    facts[eligible[i]].pc = pc;
  }

  SyntheticInstance out{datalog::Database(std::make_shared<datalog::SymbolTable>(), &store), facts.size(), variational,
                        planted};
  for (const char* name : {"write", "varWrite", "varInfFunc", "cFunction"}) out.db.relation(name, 2);
  for (const Fact& f : facts) out.db.add(f.relation, {f.a, f.b}, f.pc, &store);
  return out;
}

double trimmed_mean(std::vector<double> samples) {
  if (samples.empty()) return 0;
  std::sort(samples.begin(), samples.end());
  auto first = samples.begin(), last = samples.end();
  if (samples.size() >= 3) {
    ++first;
    --last;
  }
  return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
}

BenchReport run_bench(const SyntheticParams& params, std::size_t runs) {
  using Clock = std::chrono::steady_clock;
  featexpr::PcStore store;
  const SyntheticInstance inst = generate_synthetic(params, store);
  const datalog::Program program = analysis::behaviour_alteration_program().program;

  BenchReport report;
  report.params = params;
  report.runs = runs;
  report.input_tuples = inst.tuples;
  report.variational_facts = inst.variational;
  report.planted = inst.planted;

  engine::EvalOptions opts;
  opts.collect_stats = true;
  for (std::size_t run = 0; run < runs; ++run) {
    engine::RunStats ground_stats;
    auto start = Clock::now();
    const datalog::Database ground = engine::ground_eval(program, inst.db, &ground_stats);
    report.ground_seconds.push_back(std::chrono::duration<double>(Clock::now() - start).count());

    start = Clock::now();
    const engine::EvalResult lifted = engine::evaluate_lifted(program, inst.db, store, opts);
    report.lifted_seconds.push_back(std::chrono::duration<double>(Clock::now() - start).count());

    if (run > 0) continue;
    report.ground_output_facts = ground_stats.output_facts;
    report.lifted_output_facts = lifted.stats.output_facts;
    report.unsat_dropped = lifted.stats.unsat_dropped;
    report.output_facts_with_pc = lifted.stats.output_facts_with_pc;
    report.unique_pcs = lifted.stats.unique_pcs;
    report.output_fact_delta = ground_stats.output_facts - lifted.stats.output_facts;
    report.lifted_subset_of_ground = true;
    for (const std::string& name : engine::counted_relations(program)) {
      const auto all = ground.tuples(name);
      const auto kept = lifted.db.tuples(name);
      report.lifted_subset_of_ground &= std::includes(all.begin(), all.end(), kept.begin(), kept.end());
    }
  }
  report.ground_mean = trimmed_mean(report.ground_seconds);
  report.lifted_mean = trimmed_mean(report.lifted_seconds);
  report.overhead_percent =
      report.ground_mean > 0 ? (report.lifted_mean - report.ground_mean) / report.ground_mean * 100.0 : 0.0;
  return report;
}

std::string BenchReport::to_text(bool timings) const {
  std::string out;
  auto line = [&](const std::string& key, const std::string& value) { out += key + ": " + value + "\n"; };
  line("input_tuples", std::to_string(input_tuples));
  line("features", std::to_string(params.features));
  line("variational_percent", fixed(params.variational_percent, 2));
  line("variational_facts", std::to_string(variational_facts));
  line("planted_contradictions", std::to_string(planted));
  line("components", std::to_string(params.components));
  line("seed", std::to_string(params.seed));
  line("runs", std::to_string(runs));
  line("ground_output_facts", std::to_string(ground_output_facts));
  line("lifted_output_facts", std::to_string(lifted_output_facts));
  line("unsat_dropped", std::to_string(unsat_dropped));
  line("output_fact_delta", std::to_string(output_fact_delta));
  line("output_facts_with_pc", std::to_string(output_facts_with_pc));
  line("unique_pcs", std::to_string(unique_pcs));
  line("lifted_subset_of_ground", lifted_subset_of_ground ? "true" : "false");
  if (timings) {
    auto list = [](const std::vector<double>& xs) {
      std::string s;
      for (double x : xs) s += (s.empty() ? "" : " ") + fixed(x, 6);
      return s;
    };
    line("ground_seconds", list(ground_seconds));
    line("lifted_seconds", list(lifted_seconds));
    line("ground_seconds_trimmed_mean", fixed(ground_mean, 6));
    line("lifted_seconds_trimmed_mean", fixed(lifted_mean, 6));
    line("overhead_percent", fixed(overhead_percent, 2));
  }
  return out;
}

std::string BenchReport::to_json(bool timings) const {
  nlohmann::ordered_json doc;
  doc["input_tuples"] = input_tuples;
  doc["features"] = params.features;
  doc["variational_percent"] = params.variational_percent;
  doc["variational_facts"] = variational_facts;
  doc["planted_contradictions"] = planted;
  doc["components"] = params.components;
  doc["seed"] = params.seed;
  doc["runs"] = runs;
  doc["ground_output_facts"] = ground_output_facts;
  doc["lifted_output_facts"] = lifted_output_facts;
  doc["unsat_dropped"] = unsat_dropped;
  doc["output_fact_delta"] = output_fact_delta;
  doc["output_facts_with_pc"] = output_facts_with_pc;
  doc["unique_pcs"] = unique_pcs;
  doc["lifted_subset_of_ground"] = lifted_subset_of_ground;
  if (timings) {
    doc["ground_seconds"] = ground_seconds;
    doc["lifted_seconds"] = lifted_seconds;
    doc["ground_seconds_trimmed_mean"] = ground_mean;
    doc["lifted_seconds_trimmed_mean"] = lifted_mean;
    doc["overhead_percent"] = overhead_percent;
  }
  return doc.dump(2) + "\n";
}

}  // namespace liftdl::service
