#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "liftdl/datalog/database.hpp"
#include "liftdl/datalog/program.hpp"
#include "liftdl/featexpr/pc_store.hpp"

namespace liftdl::analysis {

using featexpr::PcStore;
using featexpr::PresenceCondition;

struct AnalysisBundle {
  std::string text;  // Datalog source
  datalog::Program program;
  std::vector<std::string> inputs;
};

/// Cross-component behaviour alteration: a write in one component flows
/// through variable-to-variable dataflow into a variable that influences
/// whether a function of another component is called.
AnalysisBundle behaviour_alteration_program();

struct Witness {
  std::string from;  // writing function
  std::string to;    // influenced function
  PresenceCondition pc;
};

struct ComponentEdge {
  std::string id;  // "<src>-><dst>"
  std::string src;
  std::string dst;
  PresenceCondition pc;  // disjunction of the witnesses' PCs
  std::vector<Witness> witnesses;
};

struct ComponentGraph {
  std::vector<std::string> features;  // sorted
  std::vector<std::string> nodes;     // sorted component names
  std::vector<ComponentEdge> edges;   // sorted by (src, dst)
};

/// Groups `behAlter(f0, f1)` tuples of `db` by the components of f0 and f1
/// (from `cFunction(f, c)`). Nodes are every component in cFunction.
/// Throws Error when a function of a result has zero or several components,
/// or when a result stays inside one component.
ComponentGraph build_component_graph(const datalog::Database& db, PcStore& store,
                                     std::string_view beh_alter = "behAlter",
                                     std::string_view c_function = "cFunction");

/// `{"features":[...],"nodes":[...],"edges":[{"id","src","dst","pc","witnesses":[{"from","to","pc"}]}]}`
/// with PCs in the feature-expression grammar.
std::string export_graph_json(const ComponentGraph& graph, const PcStore& store);
/// Inverse of export_graph_json; features are registered in `store` in the
/// document's order. Throws Error on malformed documents.
ComponentGraph parse_graph_json(std::string_view text, PcStore& store);

}  // namespace liftdl::analysis
