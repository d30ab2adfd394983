#include "liftdl/analysis/analysis.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"
#include "liftdl/common/error.hpp"

namespace liftdl::analysis {

namespace {

constexpr std::string_view kBehaviourAlteration = R"(.decl write(f: symbol, v: symbol)
.decl varWrite(src: symbol, dst: symbol)
.decl varInfFunc(v: symbol, f: symbol)
.decl cFunction(f: symbol, c: symbol)
.decl transVarWrite(src: symbol, dst: symbol)
.decl behAlter(f0: symbol, f1: symbol)
.input write, varWrite, varInfFunc, cFunction
.output transVarWrite, behAlter

transVarWrite(v0, v1) :- varWrite(v0, v1).
transVarWrite(v0, v2) :- varWrite(v0, v1),
                         transVarWrite(v1, v2).

behAlter(f0, f1) :- write(f0, v0),
                    transVarWrite(v0, v1),
                    varInfFunc(v1, f1),
                    cFunction(f0, c0),
                    cFunction(f1, c1),
                    c0 != c1.
)";

}  // namespace

AnalysisBundle behaviour_alteration_program() {
  AnalysisBundle b;
  b.text = std::string(kBehaviourAlteration);
  b.program = datalog::parse_program(b.text, "behaviour_alteration.dl");
  b.inputs = b.program.inputs();
  return b;
}

ComponentGraph build_component_graph(const datalog::Database& db, PcStore& store, std::string_view beh_alter,
                                     std::string_view c_function) {
  ComponentGraph g;
  for (const auto& f : store.features().all()) g.features.push_back(f.name);
  std::sort(g.features.begin(), g.features.end());

  std::map<std::string, std::vector<std::string>> components;  // function → components
  std::set<std::string> nodes;
  for (const auto& t : db.tuples(c_function)) {
    components[t[0]].push_back(t[1]);
    nodes.insert(t[1]);
  }
  g.nodes.assign(nodes.begin(), nodes.end());

  auto component_of = [&](const std::string& f) -> const std::string& {
    auto it = components.find(f);
    if (it == components.end()) throw Error("function '" + f + "' belongs to no component");
    if (it->second.size() != 1) throw Error("function '" + f + "' belongs to several components");
    return it->second.front();
  };

  std::map<std::pair<std::string, std::string>, ComponentEdge> edges;
  for (const auto& t : db.tuples(beh_alter)) {
    const std::string& src = component_of(t[0]);
    const std::string& dst = component_of(t[1]);
    if (src == dst) throw Error("result (" + t[0] + ", " + t[1] + ") stays inside component '" + src + "'");
    const PresenceCondition pc = *db.pc_of(beh_alter, t);
    auto [it, fresh] = edges.try_emplace({src, dst});
    ComponentEdge& e = it->second;
    if (fresh) e = ComponentEdge{src + "->" + dst, src, dst, PresenceCondition::False(), {}};
    e.pc = store.pc_or(e.pc, pc);
    e.witnesses.push_back({t[0], t[1], pc});
  }
  for (auto& [key, e] : edges) g.edges.push_back(std::move(e));
  return g;
}

std::string export_graph_json(const ComponentGraph& graph, const PcStore& store) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["features"] = graph.features;
  doc["nodes"] = graph.nodes;
  doc["edges"] = ordered_json::array();
  for (const ComponentEdge& e : graph.edges) {
    ordered_json edge;
    edge["id"] = e.id;
    edge["src"] = e.src;
    edge["dst"] = e.dst;
    edge["pc"] = store.render(e.pc);
    edge["witnesses"] = ordered_json::array();
    for (const Witness& w : e.witnesses)
      edge["witnesses"].push_back(ordered_json{{"from", w.from}, {"to", w.to}, {"pc", store.render(w.pc)}});
    doc["edges"].push_back(std::move(edge));
  }
  return doc.dump(2) + "\n";
}

ComponentGraph parse_graph_json(std::string_view text, PcStore& store) {
  ComponentGraph g;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& f : doc.at("features")) {
      g.features.push_back(f.get<std::string>());
      store.features().intern(g.features.back());
    }
    for (const auto& n : doc.at("nodes")) g.nodes.push_back(n.get<std::string>());
    for (const auto& e : doc.at("edges")) {
      ComponentEdge edge{e.at("id").get<std::string>(), e.at("src").get<std::string>(),
                         e.at("dst").get<std::string>(), store.parse(e.at("pc").get<std::string>()), {}};
      for (const auto& w : e.at("witnesses"))
        edge.witnesses.push_back(
            {w.at("from").get<std::string>(), w.at("to").get<std::string>(), store.parse(w.at("pc").get<std::string>())});
      g.edges.push_back(std::move(edge));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed graph document: ") + e.what());
  }
  return g;
}

}  // namespace liftdl::analysis
