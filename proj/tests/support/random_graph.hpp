#pragma once

#include <random>
#include <string>

#include "liftdl/extractor/fact_graph.hpp"
#include "liftdl/featexpr/pc_store.hpp"
#include "support/truth_table.hpp"

namespace liftdl::testing {

/// Random fact graph with awkward but legal ids, PC attributes rendered from
/// random formulas over `store`'s features, and an occasional opaque attribute.
inline extract::FactGraph random_graph(std::mt19937_64& rng, featexpr::PcStore& store) {
  using extract::Edge;
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const char* kTypes[] = {"COMPONENT", "FILE", "CLASS", "FUNCTION", "VARIABLE"};
  static const std::string kIdChars = "abcXYZ09_#/.:@-+*<>=!&|;,'";

  extract::FactGraph g;
  std::vector<std::string> ids;
  for (int i = 0, n = pick(0, 30); i < n; ++i) {
    std::string id = "n" + std::to_string(i);
    for (int k = 0, len = pick(0, 6); k < len; ++k) id += kIdChars[pick(0, static_cast<int>(kIdChars.size()) - 1)];
    ids.push_back(id);
    g.add_node(id, kTypes[pick(0, 4)]);
  }
  auto random_pc = [&] { return store.render(store.to_pc(random_expr(rng, store.features().size(), pick(0, 3)))); };
  if (!ids.empty()) {
    for (int i = 0, n = pick(0, 60); i < n; ++i) {
      Edge e{std::string(extract::edge_kind::kAll[pick(0, 5)]), ids[pick(0, static_cast<int>(ids.size()) - 1)],
             ids[pick(0, static_cast<int>(ids.size()) - 1)]};
      if (pick(0, 9) == 0) e.type = "custom_rel";
      g.add_edge(e);
      if (pick(0, 1)) {
        const std::string pc = random_pc();
        if (pc != "true") g.set_attribute(e, extract::kPcAttribute, pc);
      }
      if (pick(0, 15) == 0) g.set_attribute(e, "note", "say \"hi\" \\ {x}");
    }
    for (const std::string& id : ids)
      if (pick(0, 3) == 0) {
        const std::string pc = random_pc();
        if (pc != "true") g.set_attribute(id, extract::kPcAttribute, pc);
      }
  }
  return g;
}

}  // namespace liftdl::testing
