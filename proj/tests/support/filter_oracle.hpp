#pragma once

// Brute-force reference for `/filter`: enumerates every configuration of the
// graph's features and keeps the edges whose PC holds wherever the
// expression and the feature model do. Formulas are evaluated on syntax
// trees, not decision diagrams.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "liftdl/featexpr/feature_expr.hpp"
#include "support/truth_table.hpp"

namespace liftdl::testing {

struct FilterAnswer {
  std::vector<std::string> highlighted;
  bool satisfiable = false;
};

inline FilterAnswer brute_force_filter(const std::string& graph_document, const std::string& expr,
                                       const std::optional<std::string>& fm_lines = std::nullopt) {
  const auto doc = nlohmann::json::parse(graph_document);
  featexpr::FeatureRegistry registry;
  for (const auto& f : doc["features"]) registry.intern(f.get<std::string>());
  std::vector<FeatureExpr> model;
  if (fm_lines) {
    std::size_t start = 0;
    while (start <= fm_lines->size()) {
      std::size_t end = fm_lines->find('\n', start);
      if (end == std::string::npos) end = fm_lines->size();
      std::string line = fm_lines->substr(start, end - start);
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) model.push_back(featexpr::parse_feature_expr(line, registry));
      start = end + 1;
    }
  }
  registry.close();
  const FeatureExpr query = featexpr::parse_feature_expr(expr, registry);
  struct EdgePc {
    std::string id;
    FeatureExpr pc;
  };
  std::vector<EdgePc> edges;
  for (const auto& e : doc["edges"])
    edges.push_back({e["id"].get<std::string>(), featexpr::parse_feature_expr(e["pc"].get<std::string>(), registry)});

  const std::size_t n = registry.size();
  FeatureExpr guard = query;
  for (const auto& c : model) guard = FeatureExpr::conj(guard, c);
  const TruthTable antecedent = TruthTable::of(guard, n);
  FilterAnswer out;
  out.satisfiable = antecedent.any();
  if (!out.satisfiable) return out;
  for (const auto& e : edges)
    if (antecedent.implies(TruthTable::of(e.pc, n))) out.highlighted.push_back(e.id);
  return out;
}

}  // namespace liftdl::testing
